"""Scenarios and per-demand plans: the glue between caching, coupling and the codec.

A :class:`Scenario` holds the joint law of the private symbol and the
database, plus a *layer* that says how a database realization becomes the
delivered message and how each user turns the message back into its demand.
:meth:`Scenario.plan` builds everything the two-part code needs for one
demand vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .caching import (
    CachingParams,
    DatabaseRealization,
    DeliveryMessage,
    delivery,
    placement,
    user_decode,
)
from .codec import CodecTables, PrefixCode, build_prefix_code
from .coupling import CouplingTable, FunctionalRepresentation, functional_representation, greedy_coupling
from .errors import ValidationError
from .prob import ConditionalKernel, JointTable, push_forward


class CachingLayer:
    kind = "caching"

    def __init__(self, params: CachingParams):
        self.params = params
        self.users = tuple(range(1, params.K + 1))
        self.message_size = 1 << params.message_bits
        self._caches: dict = {}

    def demands(self) -> list[tuple]:
        return self.params.demands()

    def check_demand(self, d) -> tuple:
        return self.params.check_demand(d)

    def deliver(self, y, d) -> int:
        return delivery(self.params, DatabaseRealization(tuple(y), self.params.F), d).to_index()

    def side_info(self, k: int, y):
        caches = self._caches.get(y)
        if caches is None:
            caches = placement(self.params, DatabaseRealization(tuple(y), self.params.F))
            self._caches[y] = caches
        return caches[k - 1]

    def receive(self, k: int, side, c: int, d):
        return user_decode(self.params, k, side, DeliveryMessage.from_index(self.params, c), d)

    def target(self, k: int, y, d):
        return y[d[k - 1] - 1]


class DirectLayer:
    """No caching: the database *is* the message and one receiver wants it."""

    kind = "direct"
    users = (1,)

    def __init__(self, message_size: int):
        self.message_size = message_size

    def demands(self) -> list[tuple]:
        return [()]

    def check_demand(self, d) -> tuple:
        if tuple(d) != ():
            raise ValidationError("direct scenarios have a single, empty demand vector")
        return ()

    def deliver(self, y, d) -> int:
        return y

    def side_info(self, k: int, y):
        return None

    def receive(self, k: int, side, c: int, d):
        return c

    def target(self, k: int, y, d):
        return y


@dataclass
class DemandPlan:
    demand: tuple
    x_size: int
    layer: object
    joint_xy: JointTable
    joint_xc: JointTable
    kernel: ConditionalKernel
    coupling: CouplingTable
    rep: FunctionalRepresentation
    code: PrefixCode
    tables: CodecTables


@dataclass
class Scenario:
    name: str
    x_size: int
    T: int
    joint_xy: JointTable
    layer: object
    demand_list: list | None = None
    mode: str = "exact"
    samples: int = 0
    seed: int = 0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.joint_xy.shape[0] != self.x_size:
            raise ValidationError(f"joint declares |X|={self.joint_xy.shape[0]}, scenario says {self.x_size}")
        self._plans: dict = {}

    def demands(self) -> list[tuple]:
        if self.demand_list is None:
            return self.layer.demands()
        return [self.layer.check_demand(d) for d in self.demand_list]

    def joint_xc(self, d) -> JointTable:
        d = self.layer.check_demand(d)
        return _joint_xc(self, d)

    def plan(self, d, otp: bool = True, sampler: str = "random") -> DemandPlan:
        d = self.layer.check_demand(d)
        key = (d, otp, sampler)
        if key not in self._plans:
            self._plans[key] = self._build(d, otp, sampler)
        return self._plans[key]

    def _build(self, d, otp, sampler) -> DemandPlan:
        joint_xc = self.joint_xc(d)
        kernel = joint_xc.kernel(given=0)
        coupling = greedy_coupling(kernel)
        rep = functional_representation(coupling)
        if sampler == "argmax":
            rep = FunctionalRepresentation(rep.p_u, rep.f, rep.sampler.argmax())
        elif sampler != "random":
            raise ValidationError(f"unknown sampler {sampler!r}")
        code = build_prefix_code(rep.p_u)
        layer = self.layer
        tables = CodecTables(
            demand=d,
            x_size=self.x_size,
            deliver=lambda y: layer.deliver(y, d),
            rep=rep,
            code=code,
            receive=lambda k, side, c: layer.receive(k, side, c, d),
            otp=otp,
        )
        return DemandPlan(d, self.x_size, layer, self.joint_xy, joint_xc, kernel, coupling, rep, code, tables)


def _joint_xc(scenario: Scenario, d) -> JointTable:
    cache = scenario.__dict__.setdefault("_joint_cache", {})
    if d not in cache:
        layer = scenario.layer
        seen: dict = {}

        def message(y):
            if y not in seen:
                seen[y] = layer.deliver(y, d)
            return seen[y]

        cache[d] = push_forward(scenario.joint_xy, message, size=layer.message_size)
    return cache[d]
