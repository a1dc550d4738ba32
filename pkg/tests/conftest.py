import numpy as np
import pytest
import torch

# acceptance-criterion results, printed in the terminal summary
ACCEPTANCE_RESULTS = []


def record_acceptance(name, passed, detail=""):
    ACCEPTANCE_RESULTS.append((name, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {name}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def _pin_threads():
    # 2-core CI box: keep torch deterministic and away from oversubscription
    torch.set_num_threads(2)


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.PCG64(1234))


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    from shapes2toon.corpus import build_corpus

    root = tmp_path_factory.mktemp("tiny_corpus")
    return build_corpus(4, 11, root, size=64)


@pytest.fixture(scope="session")
def desk_checkpoint(tmp_path_factory, tiny_corpus):
    """A briefly-trained small model over the tiny corpus."""
    from shapes2toon.train import TrainConfig, train

    out = tmp_path_factory.mktemp("desk_run")
    cfg = TrainConfig(epochs=2, seed=5, image_size=64, ng=8, nd=8, num_threads=2)
    return train(tiny_corpus, cfg, out)
