"""Achievable average response lengths, per demand and in the worst case.

Each bound carries the key alphabet size it assumes: the two-part codes pad
``X`` and need ``T = |X|`` (``T = 2`` for the binary variant), while padding
the message directly needs ``T = |C|``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .codec import fixed_width
from .common_info import SupportView, build_axy_bxy, k_min_entropy, membership_phat
from .coupling import greedy_qstar
from .errors import NotApplicable
from .linalg import lp_maximize, nullity
from .logexact import LogRational, exact_entropy
from .prob import JointTable, entropy

LOG2E_OVER_E = math.log2(math.e) / math.e
HALF_ONE_PLUS_LOG2E = (1 + math.log2(math.e)) / 2


class BoundName(str, Enum):
    THM_BINARY = "ThmBinary"
    THM_GENERAL = "ThmGeneral"
    COMMON_INFO_K = "CommonInfoK"
    LP_BOUND = "LpBound"
    NULLITY_BOUND = "NullityBound"
    DIRECT_OTP = "DirectOtp"


def _x_size(j: JointTable, x_size: int | None) -> int:
    return j.alphabet_size(0) if x_size is None else x_size


def qstar_entropy(j: JointTable) -> float:
    return entropy(greedy_qstar(j.kernel(given=0)))


def bound_thm_binary(j: JointTable, x_size: int | None = None) -> float:
    """``H(Q*) + log2(e)/e + 2`` for a binary private symbol."""
    if _x_size(j, x_size) != 2:
        raise NotApplicable("needs |X| = 2")
    return qstar_entropy(j) + LOG2E_OVER_E + 2


def bound_thm_general(j: JointTable, x_size: int | None = None) -> float:
    """``H(Q*) + (1 + log2 e)/2 + 1 + ceil(log2 |X|)``."""
    return qstar_entropy(j) + HALF_ONE_PLUS_LOG2E + 1 + fixed_width(_x_size(j, x_size))


def bound_direct_otp(j: JointTable, x_size: int | None = None) -> float:
    """``ceil(log2 |C|)`` by padding the message itself, stated for ``|C| <= |X|``."""
    c_size = j.alphabet_size(1)
    if c_size > _x_size(j, x_size):
        raise NotApplicable(f"needs |C| <= |X|, got |C|={c_size}")
    return float(fixed_width(c_size))


def _require_member(j: JointTable):
    m = membership_phat(j)
    if not m.member:
        raise NotApplicable(m.reason)


def nullity_beta(j: JointTable) -> LogRational:
    """``log2(nullity(P_{X|C}) + 1)`` on the supports, exactly."""
    sv = SupportView.of(j)
    return LogRational.log2(nullity(sv.x_given_c()) + 1)


def bound_nullity(j: JointTable, x_size: int | None = None) -> float:
    _require_member(j)
    return float(nullity_beta(j)) + 1 + fixed_width(_x_size(j, x_size))


@dataclass(frozen=True)
class LpOutcome:
    value: float
    exact: LogRational  # H(C|X) + LP optimum
    lp_optimum: LogRational
    a: tuple
    cap_binding: bool


def solve_bound_lp(j: JointTable) -> LpOutcome:
    """Maximize ``sum_i P_C(i) a_i`` over ``A a = b, a >= 0, sum_i P_C(i) a_i <= beta - H(C|X)``.

    Solved exactly by vertex enumeration with a slack variable on the cap.
    """
    _require_member(j)
    ab = build_axy_bxy(j)
    sv = ab.support
    h = sv.h_c_given_x()
    cap = nullity_beta(j) - h
    if cap < 0:
        raise NotApplicable("beta < H(C|X): the capped program is infeasible")
    q = sv.q
    A = [list(row) + [Fraction(0)] for row in ab.A] + [list(sv.p_c) + [Fraction(1)]]
    b = list(ab.b) + [cap]
    c = list(sv.p_c) + [Fraction(0)]
    res = lp_maximize(A, b, c)
    if res.status != "optimal":
        raise NotApplicable(f"linear program is {res.status}")
    opt = LogRational.coerce(res.value)
    return LpOutcome(float(h + opt), h + opt, opt, tuple(res.x[:q]), res.x[q] == 0)


def bound_lp(j: JointTable, x_size: int | None = None) -> float:
    return solve_bound_lp(j).value + 1 + fixed_width(_x_size(j, x_size))


def bound_common_info(j: JointTable, x_size: int | None = None) -> float:
    """``K + 1 + ceil(log2 |X|)`` with ``K`` the minimum entropy of an optimal zero-leakage ``U``."""
    return float(k_min_entropy(j).value) + 1 + fixed_width(_x_size(j, x_size))


@dataclass
class BoundEntry:
    name: BoundName
    value: float | None
    required_key_size: int
    applicable: bool
    reason: str = ""
    advisory: str = ""
    exact: str = ""  # symbolic form of value
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name.value,
            "value": self.value,
            "required_key_size": self.required_key_size,
            "applicable": self.applicable,
            "reason": self.reason,
            "exact": self.exact,
        }
        if self.advisory:
            out["advisory"] = self.advisory
        if self.details:
            out["details"] = self.details
        return out


def _entry(name, key, fn, *args, exact="", details=None) -> BoundEntry:
    try:
        value = fn(*args)
    except NotApplicable as exc:
        return BoundEntry(name, None, key, False, str(exc))
    return BoundEntry(name, value, key, True, "", exact=exact, details=details or {})


def evaluate_bounds(j: JointTable, x_size: int | None = None) -> list[BoundEntry]:
    """Every bound for one joint of ``(X, C)``, with applicability and key size."""
    t = _x_size(j, x_size)
    c_size = j.alphabet_size(1)
    qstar = greedy_qstar(j.kernel(given=0))
    hq = entropy(qstar)
    hq_exact = exact_entropy(qstar.masses)
    extra = 1 + fixed_width(t)
    qdetails = {"H_qstar": hq, "H_qstar_exact": str(hq_exact), "qstar": qstar.to_json()}
    entries = [
        _entry(BoundName.THM_BINARY, 2, bound_thm_binary, j, t, exact=f"{hq_exact} + log2(e)/e + 2", details=qdetails),
        _entry(
            BoundName.THM_GENERAL,
            t,
            bound_thm_general,
            j,
            t,
            exact=f"{hq_exact} + (1 + log2(e))/2 + {extra}",
            details=qdetails,
        ),
    ]
    member = membership_phat(j)
    if member.member:
        try:
            k = k_min_entropy(j)
            entries.append(
                BoundEntry(
                    BoundName.COMMON_INFO_K,
                    float(k.value + extra),
                    t,
                    True,
                    "" if k.exact else "search truncated: K is an upper bound",
                    exact=str(k.value + extra),
                    details={"K": float(k.value), "K_exact": str(k.value), "decomposition": k.decomposition.to_json()},
                )
            )
        except NotApplicable as exc:
            entries.append(BoundEntry(BoundName.COMMON_INFO_K, None, t, False, str(exc)))
        try:
            lp = solve_bound_lp(j)
            entries.append(
                BoundEntry(
                    BoundName.LP_BOUND,
                    float(lp.exact + extra),
                    t,
                    True,
                    exact=str(lp.exact + extra),
                    details={"lp_optimum": str(lp.lp_optimum), "cap_binding": lp.cap_binding},
                )
            )
        except NotApplicable as exc:
            entries.append(BoundEntry(BoundName.LP_BOUND, None, t, False, str(exc)))
        beta = nullity_beta(j)
        entries.append(
            BoundEntry(
                BoundName.NULLITY_BOUND,
                float(beta + extra),
                t,
                True,
                exact=str(beta + extra),
                details={"beta": str(beta)},
            )
        )
    else:
        for name in (BoundName.COMMON_INFO_K, BoundName.LP_BOUND, BoundName.NULLITY_BOUND):
            entries.append(BoundEntry(name, None, t, False, member.reason))
    direct = _entry(BoundName.DIRECT_OTP, c_size, bound_direct_otp, j, t, exact=str(fixed_width(c_size)))
    if not direct.applicable:
        direct.advisory = f"padding C directly with a key of size {c_size} would cost {fixed_width(c_size)} bits"
    entries.append(direct)
    return entries


def best_bound(entries: list[BoundEntry], T: int) -> BoundEntry | None:
    usable = [e for e in entries if e.applicable and e.required_key_size <= T]
    return min(usable, key=lambda e: (e.value, e.name.value), default=None)


@dataclass
class BoundReport:
    T: int
    per_demand: dict  # demand tuple -> list[BoundEntry]
    worst_case: float | None
    worst_demand: tuple | None
    best_per_demand: dict = field(default_factory=dict)  # demand -> BoundName | None
    # bound name -> (value, demand) when usable for every demand, else None
    worst_by_bound: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "worst_case": self.worst_case,
            "worst_demand": list(self.worst_demand) if self.worst_demand is not None else None,
            "worst_by_bound": {
                name.value: None if w is None else {"value": w[0], "demand": list(w[1])}
                for name, w in self.worst_by_bound.items()
            },
            "per_demand": [
                {
                    "demand": list(d),
                    "best": self.best_per_demand[d].value if self.best_per_demand.get(d) else None,
                    "bounds": [e.to_json() for e in entries],
                }
                for d, entries in self.per_demand.items()
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["demand", "bound", "value", "required_key_size", "applicable", "usable_with_T", "reason"])
        for d, entries in self.per_demand.items():
            for e in entries:
                w.writerow(
                    [
                        "-".join(map(str, d)) or "()",
                        e.name.value,
                        "" if e.value is None else repr(e.value),
                        e.required_key_size,
                        e.applicable,
                        e.applicable and e.required_key_size <= self.T,
                        e.reason,
                    ]
                )
        return buf.getvalue()


def evaluate_all(scenario, T: int | None = None, demands=None) -> BoundReport:
    """Bounds for every demand vector and the worst case of the per-demand best.

    A bound is usable when its key requirement does not exceed ``T``.  The
    report also carries, for each bound on its own, the worst case over
    demands (``None`` if that bound is unusable for some demand).  When some
    demand has no usable bound at all, ``worst_case`` is ``None`` and
    ``worst_demand`` names the first such demand.
    """
    T = scenario.T if T is None else T
    demands = scenario.demands() if demands is None else demands
    per, best = {}, {}
    worst, worst_d = None, None
    for d in demands:
        entries = evaluate_bounds(scenario.joint_xc(d), scenario.x_size)
        per[tuple(d)] = entries
        b = best_bound(entries, T)
        best[tuple(d)] = b.name if b else None
        value = b.value if b else math.inf
        if worst is None or value > worst:
            worst, worst_d = value, tuple(d)
    if worst is not None and math.isinf(worst):
        worst = None
    by_bound = {}
    for name in BoundName:
        w = None
        for d, entries in per.items():
            e = next(e for e in entries if e.name is name)
            if not (e.applicable and e.required_key_size <= T):
                w = None
                break
            if w is None or e.value > w[0]:
                w = (e.value, d)
        by_bound[name] = w
    return BoundReport(T, per, worst, worst_d, best, by_bound)
