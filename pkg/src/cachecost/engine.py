"""Discrete-event replay of a request stream under one policy.

The engine walks the trace once, asks the policy for a verdict per
request, and turns verdicts into dollars: a recompute per miss, the flat
transmission price per request, and storage billed for the exact hours
each item spends resident. Residency intervals open when a verdict stores
an item and close at the earliest of its deadline, its capacity eviction,
or the final event of the trace.

A warmup threshold makes the ledger count only requests at or after the
threshold and only storage accrued from it onwards, while the cache state
is still built from the entire prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Protocol

from .analytic import CostModel
from .policies import PolicyVerdict
from .workload import ItemId, Request

__all__ = [
    "CostLedger",
    "InvariantViolation",
    "Policy",
    "cost_per_request",
    "run",
    "warmup_filter",
]


class InvariantViolation(RuntimeError):
    """A policy verdict or event ordering broke an engine invariant."""


class Policy(Protocol):
    def on_request(self, item: ItemId, now: float) -> PolicyVerdict: ...


@dataclass(frozen=True)
class CostLedger:
    """Dollar and event totals of one run.

    compute_dollars is exactly computes * compute price and
    transmission_dollars exactly requests * transmission price; storage is
    the sum of billed item-hours times the storage price. span is the time
    from first to last trace event regardless of warmup.
    """

    requests: int
    hits: int
    computes: int
    compute_dollars: float
    storage_dollars: float
    transmission_dollars: float
    span: float

    @property
    def total_dollars(self) -> float:
        return self.compute_dollars + self.storage_dollars + self.transmission_dollars


def cost_per_request(ledger: CostLedger) -> float:
    """Average dollars per counted request. Errors on an empty ledger."""
    if ledger.requests == 0:
        raise ValueError("cost per request is undefined on a zero-request ledger")
    return ledger.total_dollars / ledger.requests


def run(
    trace: Iterable[Request],
    policy: Policy,
    costs: CostModel,
    *,
    warmup: float = 0.0,
) -> CostLedger:
    """Replay `trace` under `policy` and price it with `costs`.

    The trace must be nondecreasing in time. With warmup > 0, requests
    before the threshold still drive the policy but are not counted, and
    residency intervals are clipped to their post-warmup part. An entirely
    pre-warmup trace yields a zero-request ledger.
    """
    warmup = float(warmup)
    if not (math.isfinite(warmup) and warmup >= 0.0):
        raise ValueError(f"warmup must be finite and >= 0, got {warmup!r}")

    on_request = policy.on_request
    residency: dict[ItemId, list[float]] = {}
    item_hours = 0.0
    requests = 0
    hits = 0
    t_first = None
    prev = -math.inf

    for time, item in trace:
        if time < prev:
            raise InvariantViolation(f"trace time regression: {time} after {prev}")
        prev = time
        if t_first is None:
            t_first = time

        hit, store_until, evicted = on_request(item, time)

        slot = residency.get(item)
        if hit:
            if slot is None or slot[1] < time:
                raise InvariantViolation(
                    f"policy reported a hit for {item} at {time} without residency"
                )
        elif slot is not None:
            # Residency lapsed at its deadline, before or at this miss.
            start, deadline = slot
            if deadline > time:
                raise InvariantViolation(
                    f"policy reported a miss for {item} at {time} while resident"
                )
            if deadline > warmup:
                item_hours += deadline - (start if start > warmup else warmup)
            del residency[item]
            slot = None

        if store_until is not None:
            if store_until < time:
                raise InvariantViolation(
                    f"store_until {store_until} lies before the request at {time}"
                )
            if slot is not None:
                slot[1] = store_until
            else:
                residency[item] = [time, store_until]
        elif slot is not None:
            # Hit whose verdict ends residency now (final kept gap).
            if time > warmup:
                item_hours += time - (slot[0] if slot[0] > warmup else warmup)
            del residency[item]

        if evicted:
            for victim in evicted:
                vslot = residency.pop(victim, None)
                if vslot is None:
                    raise InvariantViolation(f"eviction of non-resident item {victim}")
                if time > warmup:
                    item_hours += time - (vslot[0] if vslot[0] > warmup else warmup)

        if time >= warmup:
            requests += 1
            if hit:
                hits += 1

    t_end = prev if t_first is not None else 0.0
    for start, deadline in residency.values():
        end = t_end if t_end < deadline else deadline
        if end > warmup:
            item_hours += end - (start if start > warmup else warmup)

    computes = requests - hits
    return CostLedger(
        requests=requests,
        hits=hits,
        computes=computes,
        compute_dollars=computes * costs.compute_per_item,
        storage_dollars=item_hours * costs.storage_per_item_hour,
        transmission_dollars=requests * costs.transmission_per_item,
        span=(t_end - t_first) if t_first is not None else 0.0,
    )


def warmup_filter(
    trace: Iterable[Request],
    policy: Policy,
    costs: CostModel,
    warmup: float,
) -> CostLedger:
    """`run` with measurement starting at `warmup` hours.

    Cache state builds from the full prefix; only post-threshold requests
    and storage are billed. warmup = 0 is identical to a plain run.
    """
    return run(trace, policy, costs, warmup=warmup)
