import pytest

from xworkbench.corpus import entries, load, recompute

ENTRIES = entries()


def test_corpus_is_present():
    names = {e.name for e in ENTRIES}
    assert {"peirce", "peirce-mutated", "cbn-unrestricted-union", "figure", "counterexample-1",
            "counterexample-2", "cbn-expansion-failure", "critical-pair"} <= names


@pytest.mark.parametrize("entry", ENTRIES, ids=[e.name for e in ENTRIES])
def test_every_artifact_carries_a_tag(entry):
    data = load(entry)
    assert data["name"] == entry.name
    assert (entry / "README.md").is_file()
    for artifact in data["artifacts"]:
        tag = artifact["tag"]
        assert isinstance(tag, str) and tag.isalpha() and tag.isupper()


@pytest.mark.parametrize("entry", ENTRIES, ids=[e.name for e in ENTRIES])
def test_recomputation_matches_stored_artifacts(entry):
    stored = {a["name"]: a["value"] for a in load(entry)["artifacts"]}
    assert recompute(entry) == stored
