import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sentinel.cli import fixture_config_path  # noqa: E402

_acceptance_results = {}


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        marker = getattr(report, "_acceptance", None)
        if marker is None:
            return
        outcome = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        prev = _acceptance_results.get(marker)
        # a criterion passes only if every check attached to it passes
        if prev is None or prev[0] == "PASS" or outcome == "FAIL":
            _acceptance_results[marker] = (outcome, report.nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        rep._acceptance = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (outcome, nodeid) in sorted(_acceptance_results.items()):
        terminalreporter.write_line(f"[{outcome}] AC{number:>2} {title}")


@pytest.fixture(scope="session")
def fixture_config():
    from sentinel.config import PipelineConfig

    return PipelineConfig.load(fixture_config_path())


@pytest.fixture(scope="session")
def fixture_corpus(fixture_config):
    from sentinel.ingest import ingest

    corpus, _ = ingest(list(fixture_config.sources.values()))
    return corpus


@pytest.fixture(scope="session")
def fixture_processed(fixture_corpus, fixture_config):
    from sentinel.cli import preprocess_corpus

    processed, _ = preprocess_corpus(fixture_corpus, fixture_config)
    return processed


@pytest.fixture(scope="session")
def fixture_split(fixture_processed):
    from sentinel.corpus import split_corpus

    return split_corpus(fixture_processed, seed=42)


@pytest.fixture(scope="session")
def baseline_model(fixture_split):
    from sentinel.model import TfidfLogisticClassifier

    train = fixture_split.train
    return TfidfLogisticClassifier().fit([r.cleaned for r in train], [r.label for r in train])


TOY_POSITIVE = "die hopeless pills goodbye numb burden empty trapped".split()
TOY_NEGATIVE = "pizza guitar puppy beach concert kitten garden movie".split()
TOY_FILLER = "today feel really time people know friend night".split()


def toy_texts(n, seed=0, positive_share=0.55):
    """Toy posts where the label is decided by one topic word."""
    import random

    rng = random.Random(seed)
    texts, labels = [], []
    for _ in range(n):
        y = int(rng.random() < positive_share)
        words = rng.sample(TOY_FILLER, rng.randint(1, 4))
        words.insert(rng.randrange(len(words) + 1), rng.choice(TOY_POSITIVE if y else TOY_NEGATIVE))
        texts.append(" ".join(words))
        labels.append(y)
    return texts, labels


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    pytest.importorskip("torch")
    pytest.importorskip("transformers")
    from _tiny_electra import build_checkpoint

    path = tmp_path_factory.mktemp("tiny-electra")
    return build_checkpoint(path, TOY_POSITIVE + TOY_NEGATIVE + TOY_FILLER)
