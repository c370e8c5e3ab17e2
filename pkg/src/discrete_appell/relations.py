"""Contiguous and second-order recursion relations as data.

Each relation is written as ``left = right`` in a tiny expression language:

* ``F`` is the function at the base parameters, ``F(a+1)`` or
  ``F(b1-1, c+1)`` at shifted ones.
* ``a``, ``b1``, ``b2``, ``c`` are the base parameter values (never the
  shifted ones).
* ``A``, ``B1``, ``B2``, ``C`` are operator shorthands whose meaning depends
  on the flavour of the catalogue:

  ============  ==================  ==============  ==================
  flavour       A                   B1              C
  ============  ==================  ==============  ==================
  differential  a + theta + phi     b1 + theta      c + theta + phi
  lattice       a + T1/k1 + T2/k2   b1 + T1/k1      c + T1/k1 + T2/k2
  joint         a + T/k             b1 + theta      c + T/k
  ============  ==================  ==============  ==================

  (B2 mirrors B1 with phi, T2/k2.)  T1, T2, T are the Theta_t operators.
"""
import ast
from dataclasses import dataclass
from typing import Dict, Tuple

from .operators import (
    PHI,
    THETA,
    THETA_T1_PER_STEP,
    THETA_T2_PER_STEP,
    THETA_T_PER_STEP,
    Affine,
    OperatorExpr,
    apply_weighted,
    param,
)
from .series import DEFAULT_OPTIONS

FIRST_ORDER = (
    "a*F(a+1) = A*F",
    "(A-1)*F(a-1) = (a-1)*F",
    "b1*F(b1+1) = B1*F",
    "(B1-1)*F(b1-1) = (b1-1)*F",
    "b2*F(b2+1) = B2*F",
    "(B2-1)*F(b2-1) = (b2-1)*F",
    "(c-1)*F(c-1) = (C-1)*F",
    "C*F(c+1) = c*F",
)

SECOND_ORDER = (
    "a*(a-1)*F(a+1) = A*(A-1)*F(a-1)",
    "a*(b1-1)*F(a+1) = A*(B1-1)*F(b1-1)",
    "a*(b2-1)*F(a+1) = A*(B2-1)*F(b2-1)",
    "a*c*F(a+1) = A*C*F(c+1)",
    "a*B1*F(a+1) = b1*A*F(b1+1)",
    "a*B2*F(a+1) = b2*A*F(b2+1)",
    "a*(C-1)*F(a+1) = (c-1)*A*F(c-1)",
    "(A-1)*B1*F(a-1) = b1*(a-1)*F(b1+1)",
    "(A-1)*B2*F(a-1) = b2*(a-1)*F(b2+1)",
    "(A-1)*(C-1)*F(a-1) = (c-1)*(a-1)*F(c-1)",
    "(b1-1)*(A-1)*F(a-1) = (a-1)*(B1-1)*F(b1-1)",
    "(b2-1)*(A-1)*F(a-1) = (a-1)*(B2-1)*F(b2-1)",
    "c*(A-1)*F(a-1) = (a-1)*C*F(c+1)",
    "b1*(b1-1)*F(b1+1) = B1*(B1-1)*F(b1-1)",
    "b1*B2*F(b1+1) = b2*B1*F(b2+1)",
    "b1*(b2-1)*F(b1+1) = B1*(B2-1)*F(b2-1)",
    "b1*(C-1)*F(b1+1) = (c-1)*B1*F(c-1)",
    "b1*c*F(b1+1) = C*B1*F(c+1)",
    "b2*(b1-1)*F(b2+1) = B2*(B1-1)*F(b1-1)",
    "b2*(b2-1)*F(b2+1) = B2*(B2-1)*F(b2-1)",
    "b2*(C-1)*F(b2+1) = (c-1)*B2*F(c-1)",
    "b2*c*F(b2+1) = C*B2*F(c+1)",
    "(b2-1)*(B1-1)*F(b1-1) = (b1-1)*(B2-1)*F(b2-1)",
    "(B1-1)*(C-1)*F(b1-1) = (c-1)*(b1-1)*F(c-1)",
    "c*(B1-1)*F(b1-1) = (b1-1)*C*F(c+1)",
    "(B2-1)*(C-1)*F(b2-1) = (c-1)*(b2-1)*F(c-1)",
    "c*(B2-1)*F(b2-1) = (b2-1)*C*F(c+1)",
    "c*(c-1)*F(c-1) = (C-1)*C*F(c+1)",
)

# the joint-lattice second-order list leaves out the relations between b1 and b2 alone
JOINT_SECOND_ORDER_INDICES = tuple(range(1, 14)) + (17, 18, 21, 22) + tuple(range(24, 29))


def _macros(flavour):
    a, b1, b2, c = (param(n) for n in ("a", "b1", "b2", "c"))
    if flavour == "differential":
        jx, jy, joint = THETA, PHI, THETA + PHI
    elif flavour == "lattice":
        jx, jy = THETA_T1_PER_STEP, THETA_T2_PER_STEP
        joint = jx + jy
    elif flavour == "joint":
        jx, jy, joint = THETA, PHI, THETA_T_PER_STEP
    else:
        raise ValueError(f"unknown relation flavour {flavour!r}")
    return {"A": a + joint, "B1": b1 + jx, "B2": b2 + jy, "C": c + joint}


@dataclass(frozen=True)
class Term:
    coefficient: complex
    operator: OperatorExpr
    shift: Tuple[Tuple[str, int], ...]

    def shift_dict(self) -> Dict[str, int]:
        return dict(self.shift)


@dataclass(frozen=True)
class Relation:
    catalogue: str
    index: int
    text: str
    left: Tuple[Term, ...]
    right: Tuple[Term, ...]


@dataclass(frozen=True)
class _Shifted:
    shift: Tuple[Tuple[str, int], ...]


def _parse_shift(call):
    shift = {}
    for arg in call.args:
        if not (isinstance(arg, ast.BinOp) and isinstance(arg.left, ast.Name)):
            raise ValueError(f"bad shift {ast.dump(arg)}")
        sign = {ast.Add: 1, ast.Sub: -1}[type(arg.op)]
        shift[arg.left.id] = shift.get(arg.left.id, 0) + sign * arg.right.value
    return _Shifted(tuple(sorted(shift.items())))


def _evaluate(node, macros):
    """Evaluate to Affine, OperatorExpr or a list of (OperatorExpr, shift) terms."""
    if isinstance(node, ast.Constant):
        return Affine.constant(node.value)
    if isinstance(node, ast.Name):
        if node.id == "F":
            return _Shifted(())
        if node.id in macros:
            return macros[node.id]
        return param(node.id)
    if isinstance(node, ast.Call):
        return _parse_shift(node)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return _scale(_evaluate(node.operand, macros), -1)
    if isinstance(node, ast.BinOp):
        left, right = _evaluate(node.left, macros), _evaluate(node.right, macros)
        if isinstance(node.op, ast.Mult):
            return _multiply(left, right)
        if isinstance(node.op, (ast.Add, ast.Sub)):
            sign = 1 if isinstance(node.op, ast.Add) else -1
            if isinstance(left, Affine) and isinstance(right, Affine):
                return left + right.scaled(sign)
            return _terms(left) + _scale(_terms(right), sign)
    raise ValueError(f"unsupported relation syntax: {ast.dump(node)}")


def _multiply(left, right):
    if isinstance(left, _Shifted) or isinstance(left, list):
        left, right = right, left
    if isinstance(right, _Shifted):
        return [Term(1, _as_expr(left), right.shift)]
    if isinstance(right, list):
        return [Term(t.coefficient, _as_expr(left) * t.operator, t.shift) for t in right]
    return _as_expr(left) * _as_expr(right)


def _as_expr(value):
    if isinstance(value, OperatorExpr):
        return value
    return OperatorExpr((value,))


def _terms(value):
    if isinstance(value, list):
        return value
    if isinstance(value, _Shifted):
        return [Term(1, OperatorExpr(), value.shift)]
    raise ValueError("an operator must multiply a function value")


def _scale(value, factor):
    if isinstance(value, Affine):
        return value.scaled(factor)
    if isinstance(value, list):
        return [Term(t.coefficient * factor, t.operator, t.shift) for t in value]
    return _scale(_terms(value), factor)


def parse_relation(text, flavour, catalogue="", index=0):
    left_text, right_text = text.split("=")
    macros = _macros(flavour)
    sides = []
    for side in (left_text, right_text):
        tree = ast.parse(side.strip(), mode="eval").body
        sides.append(tuple(_terms(_evaluate(tree, macros))))
    return Relation(catalogue, index, text, sides[0], sides[1])


# catalogue id -> (family, flavour, relation texts)
CATALOGUES = {
    "ContiguousDiff8": ("first", "differential", FIRST_ORDER),
    "RecursionDiff28": ("first", "differential", SECOND_ORDER),
    "ContiguousDelta8": ("first", "lattice", FIRST_ORDER),
    "RecursionDelta28": ("first", "lattice", SECOND_ORDER),
    "F2Mirror_ContiguousDiff8": ("second", "differential", FIRST_ORDER),
    "F2Mirror_RecursionDiff28": ("second", "differential", SECOND_ORDER),
    "F2Mirror_ContiguousDelta8": ("second", "joint", FIRST_ORDER),
    "F2Mirror_RecursionDelta22": (
        "second",
        "joint",
        tuple(SECOND_ORDER[i - 1] for i in JOINT_SECOND_ORDER_INDICES),
    ),
}


def catalogue_size(catalogue):
    return len(CATALOGUES[catalogue][2])


def enumerate_relation(catalogue, index) -> Relation:
    """The ``index``-th relation (1-based, in catalogue order) of a catalogue."""
    if catalogue not in CATALOGUES:
        raise KeyError(f"unknown catalogue {catalogue!r}")
    _, flavour, texts = CATALOGUES[catalogue]
    if not 1 <= index <= len(texts):
        raise IndexError(f"{catalogue} has relations 1..{len(texts)}, not {index}")
    return parse_relation(texts[index - 1], flavour, catalogue, index)


def evaluate_side(terms, params, opts=DEFAULT_OPTIONS):
    total = 0j
    for term in terms:
        shifted = params.shifted(**term.shift_dict())
        value = apply_weighted(shifted, term.operator, opts, constants=params).value
        total += term.coefficient * value
    return total


def evaluate_relation(relation: Relation, params, opts=DEFAULT_OPTIONS):
    """(left, right) values of a relation at ``params``."""
    return evaluate_side(relation.left, params, opts), evaluate_side(relation.right, params, opts)
