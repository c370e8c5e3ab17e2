# %% [markdown]
# # Gamma(-t)-weighted integrals where the series diverges
#
# For k >= 1 and noninteger t the discrete series are formal. Their terms eventually grow factorially.
# The Laplace-type integrals carrying a Gamma(-t) weight remain finite there.
# This notebook only measures how these integrals relate to other quantities and asserts nothing.
# The identity suite checks just two things for them:
#
# * The two first-form integrals agree under the swap x <-> y.
# * Every form reduces to the series when k = 0.

# %%
import random

import numpy as np

from discrete_appell.functions import eval_f1_d1, eval_f1_d2
from discrete_appell.integrals import IntegralForm, eval_integral
from discrete_appell.verification import FAMILIES, T_FORM_QUADRATURE, asymptotic_reference, rel_residual

T1 = IntegralForm("laplace_t1")
T2 = IntegralForm("laplace_t2")
T = IntegralForm("laplace_t", "second")

# %% [markdown]
# ## The k = 0 limit
#
# With k = 0 the series converges, and all three integrals reproduce it.
# The T2 weight sits on t2, so t2 needs a negative real part here too.

# %%
draw = FAMILIES["integral_laplace_t"].draw(random.Random(1), "terminating")
p0 = draw.params.replace(k1=0, k2=0, t2=draw.extras["t_other"])
series = eval_f1_d1(p0).value
for form in (T1, T2):
    print(form, f"{rel_residual(eval_integral(form, p0, T_FORM_QUADRATURE).value, series):.1e}")
q0 = FAMILIES["second_integral_laplace_t"].draw(random.Random(1), "terminating").params.replace(k=0)
print(T, f"{rel_residual(eval_integral(T, q0, T_FORM_QUADRATURE).value, eval_f1_d2(q0).value):.1e}")

# %% [markdown]
# ## Mutual consistency at k >= 1
#
# T1 at (x, y) and T2 at the swapped parameters run through separate code paths.
# The residuals are at rounding level or exactly zero, because the mirrored quadratures do the same arithmetic.
# The check guards how arguments and weights are routed. It says nothing about quadrature accuracy.
# Accuracy is covered by the k = 0 limit above.

# %%
rng = random.Random(5)
for _ in range(4):
    p = FAMILIES["integral_laplace_t"].draw(rng, "terminating").params
    a = eval_integral(T1, p, T_FORM_QUADRATURE).value
    b = eval_integral(T2, p.swapped(), T_FORM_QUADRATURE).value
    print(f"k1={p.k1} k2={p.k2}  T1 = {a:.10f}  residual {rel_residual(a, b):.1e}")

# %% [markdown]
# ## Against the optimally truncated series
#
# A divergent series can still be cut at its smallest diagonal.
# For asymptotic series the error of that cut is typically of the size of the smallest term.
# The measurement below compares the second-form integral with the cut series, in units of that smallest term.
# A ratio below 1 is consistent with the integral being the function the formal series is asymptotic to.
# This is a measurement and not a proof.

# %%
rng = random.Random(11)
ratios = []
for i in range(20):
    q = FAMILIES["second_integral_laplace_t"].draw(rng, "terminating").params.replace(k=1 + i % 2)
    value = eval_integral(T, q, T_FORM_QUADRATURE).value
    cut, smallest = asymptotic_reference(q)
    if smallest == 0:
        continue
    ratios.append(abs(value - cut) / smallest)
ratios = np.array(ratios)
print(f"{len(ratios)} draws; |T - cut| / smallest term: median {np.median(ratios):.3f}, max {ratios.max():.3f}")
print("fraction below 1:", np.mean(ratios <= 1))
