# %% [markdown]
# # Evaluating the discrete Appell series
#
# Two discrete analogues of the Appell F1 series are implemented.
#
# * `eval_f1_d1` carries a separate lattice factor on each variable: `(t1, k1)` on x and `(t2, k2)` on y.
# * `eval_f1_d2` carries one lattice factor `(t, k)` on the joint index m + n.
#
# Every evaluation returns a value together with a verdict saying how the summation ended.

# %%
import cmath

import mpmath
import numpy as np

from discrete_appell.functions import (
    Appell1Params,
    Appell2Params,
    eval_classical_f1,
    eval_f1_d1,
    eval_f1_d2,
)
from discrete_appell.series import SeriesOptions

# %% [markdown]
# ## The three regimes
#
# With k = 0 the lattice factor disappears and the series is the classical F1.
# With k >= 1 and t a nonnegative integer, (-t)_(mk) vanishes for large m, so the series is a polynomial.
# For any other t with k >= 1 the terms grow factorially. The engine flags this as `DivergenceSuspected`.
# The directions are independent: if only the x side is cut off, the y sum is still infinite.

# %%
cases = {
    "classical (k = 0)": Appell1Params(1.2, 0.7, 2.1, 2.9, 0.4, -1.3, 0, 0, 0.3, -0.2 + 0.1j),
    "x side cut off (t1 = 7, k1 = 2)": Appell1Params(1.2, 0.7, 2.1, 2.9, 7, -1.3, 2, 0, 0.3, -0.2 + 0.1j),
    "both sides cut off (t2 = 4, k2 = 1)": Appell1Params(1.2, 0.7, 2.1, 2.9, 7, 4, 2, 1, 0.3, -0.2 + 0.1j),
    "formal (t1 = 0.4, k1 = 1)": Appell1Params(1.2, 0.7, 2.1, 2.9, 0.4, -1.3, 1, 0, 0.3, -0.2 + 0.1j),
}
for label, p in cases.items():
    r = eval_f1_d1(p)
    print(f"{label:36s} {r.verdict.value:20s} terms={r.terms_summed:5d}  value={r.value:.12g}")

# %% [markdown]
# In the classical regime the value matches mpmath's `appellf1` whenever both are defined.

# %%
a, b1, b2, c, x, y = 1.2, 0.7, 2.1, 2.9, 0.3, -0.2
ours = eval_classical_f1(a, b1, b2, c, x, y).value
ref = complex(mpmath.appellf1(a, b1, b2, c, x, y))
print(ours, ref, abs(ours - ref) / abs(ref))

# %% [markdown]
# ## Formal series stay formal
#
# A larger term budget does not rescue the formal regime. The verdict is the same at every budget.
# The value returned is the partial sum up to the smallest diagonal, with that diagonal's size as the tail estimate.

# %%
p = cases["formal (t1 = 0.4, k1 = 1)"]
for budget in (100, 1000, 8000):
    r = eval_f1_d1(p, SeriesOptions(max_diagonal=budget))
    print(budget, r.verdict.value, r.terms_summed, f"{r.tail_estimate:.3e}")

# %% [markdown]
# ## The joint-lattice form
#
# With k = 0 the second form is the classical F1 too, at every t.

# %%
rng = np.random.default_rng(0)
for _ in range(3):
    t = rng.uniform(-3, 3)
    q = Appell2Params(1.2, 0.7, 2.1, 2.9, t, 0, 0.3, -0.2)
    print(f"t = {t:+.3f}  {eval_f1_d2(q).value:.15f}")
print(f"classical   {eval_classical_f1(1.2, 0.7, 2.1, 2.9, 0.3, -0.2).value:.15f}")

# %% [markdown]
# A terminating second-form series is a polynomial of total degree floor(t / k) in x and y.
# Its value at a point with |x|, |y| > 1 is therefore still well defined.

# %%
q = Appell2Params(1.2, 0.7, 2.1, 2.9, 6, 2, 1.5, -2.0)
r = eval_f1_d2(q)
print(r.verdict.value, r.terms_summed, r.value)

# %% [markdown]
# ## A small grid
#
# This is the same table the CLI `table` command writes. A terminating first form is sampled on the circle |x| = 0.3 with y = 0.1.

# %%
for angle in np.linspace(0, np.pi, 5):
    x = cmath.rect(0.3, angle)
    v = eval_f1_d1(Appell1Params(1.2, 0.7, 2.1, 2.9, 9, 4, 3, 1, x, 0.1)).value
    print(f"arg x = {angle:.3f}  |F| = {abs(v):.6f}")
