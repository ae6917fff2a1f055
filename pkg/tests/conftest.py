"""Shared fixtures: one expert corpus and the models trained from it.

Everything heavy is session-scoped and fully seeded, so the suite trains each
model exactly once and every test sees identical artifacts.
"""

import numpy as np
import pytest

import hypsweep as hs

CORPUS_SEED = 11
CORPUS_EPISODES = 520  # a hair over 500 so the corpus survives rare stalls
PROTOCOL_SEED = 42


@pytest.fixture(scope="session")
def corpus():
    demos, stats = hs.record_demo_corpus(10, 10, hs.H3, CORPUS_EPISODES,
                                         master_seed=CORPUS_SEED)
    assert stats["kept"] >= 500
    return demos


@pytest.fixture(scope="session")
def mc_model(corpus):
    model, _ = hs.train_linear(hs.build_mc_dataset(corpus), hs.Hyperparams())
    return model


@pytest.fixture(scope="session")
def b8_model(corpus):
    model, _ = hs.train_linear(hs.build_binary_dataset(corpus, mode="b8"),
                               hs.Hyperparams())
    return model


@pytest.fixture(scope="session")
def be_model(corpus):
    model, _ = hs.train_linear(hs.build_binary_dataset(corpus, mode="be", seed=0),
                               hs.Hyperparams())
    return model


@pytest.fixture(scope="session")
def protocol_report(mc_model, b8_model):
    config = hs.ProtocolConfig(master_seed=PROTOCOL_SEED)
    agents = [
        hs.AgentSpec(kind="oracle"),
        hs.AgentSpec(kind="hp"),
        hs.AgentSpec(kind="mc", model=mc_model),
        hs.AgentSpec(kind="b8", model=b8_model),
    ]
    return hs.run_protocol(config, agents)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
