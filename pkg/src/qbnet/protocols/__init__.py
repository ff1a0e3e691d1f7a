"""Worked nets with their expected identities and entropy tables."""

from .classical import (
    CbExample,
    cb_examples,
    chain_rule_residual,
    copy_chain,
    dp_inequality_check,
    time_reversed_chain,
)
from .environment import SysEnvParams, TwoMixParams, sys_env_net, two_mixtures_net
from .fixture import Expectation, ProtocolFixture
from .quantum import dense_coding_net, eraser_net, epr_net, teleport_net


def standard_fixtures(seed=0) -> list[ProtocolFixture]:
    """One instance of every protocol, with seeded parameters where they are free."""
    from ..randomness import random_state, rng_from

    rng = rng_from(seed)
    return [
        epr_net(),
        eraser_net(),
        teleport_net(random_state(2, rng)),
        dense_coding_net(random_state(4, rng)),
        sys_env_net(1, seed=rng),
        sys_env_net(2, seed=rng),
        two_mixtures_net(seed=rng),
    ]


__all__ = [
    "CbExample",
    "Expectation",
    "ProtocolFixture",
    "SysEnvParams",
    "TwoMixParams",
    "cb_examples",
    "chain_rule_residual",
    "copy_chain",
    "dense_coding_net",
    "dp_inequality_check",
    "epr_net",
    "eraser_net",
    "standard_fixtures",
    "sys_env_net",
    "teleport_net",
    "time_reversed_chain",
    "two_mixtures_net",
]
