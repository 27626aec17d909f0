import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbmle import Instance, Profile, parse_pb, to_instance_profile, write_pb
from pbmle.fixtures import phragmen_fixture
from pbmle.pabulib import PbParseError, canonicalize, read_pb

from conftest import instance_and_profile

FIXTURE = phragmen_fixture()
A1 = write_pb(FIXTURE.instance, FIXTURE.profiles[0])


def test_write_canonical_form():
    lines = A1.splitlines()
    assert lines[:2] == ["META", "key;value"]
    assert "project_id;cost" in lines and "voter_id;vote" in lines
    assert lines[-5:] == ["1;p1", "2;p1,p3,p4", "3;p2,p3,p4", "4;p2,p3,p4", "5;p2,p3,p4"]


def test_parse_fixture():
    pb = parse_pb(A1)
    assert len(pb.votes) == 5 and pb.budget == 3
    inst, prof = to_instance_profile(pb)
    assert inst == FIXTURE.instance and prof == FIXTURE.profiles[0]


def test_read_file(tmp_path):
    path = tmp_path / "a1.pb"
    path.write_text(A1)
    assert read_pb(path) == (FIXTURE.instance, FIXTURE.profiles[0])


def test_empty_votes_and_extras():
    text = (
        "META\nkey;value\nnum_projects;2\nnum_votes;2\nbudget;5\nvote_type;approval\ndescription;demo\n"
        "PROJECTS\nproject_id;cost;name\na;2;Park\nb;3;Library\n"
        "VOTES\nvoter_id;vote;age\nx;;30\ny;a,b;41\n"
    )
    pb = parse_pb(text)
    assert pb.projects[0].extras == {"name": "Park"}
    assert pb.votes[0].approved == () and pb.votes[1].extras == {"age": "41"}
    inst, prof = to_instance_profile(pb)
    assert inst.costs == {"a": 2, "b": 3}
    assert prof.ballots[0] == frozenset()
    again = canonicalize(text)
    assert canonicalize(again) == again
    assert "description;demo" in again


BASE = A1


@pytest.mark.parametrize(
    "text, code",
    [
        (BASE.replace("2;p1,p3,p4", "2;p1,p9"), "dangling-reference"),
        (BASE.replace("vote_type;approval", "vote_type;ordinal"), "unsupported-vote-type"),
        (BASE.replace("VOTES\n", ""), "missing-section"),
        (BASE.replace("num_votes;5", "num_votes;4"), "count-mismatch"),
        (BASE.replace("num_projects;4", "num_projects;5"), "count-mismatch"),
        (BASE.replace("p2;1", "p2;one"), "invalid-integer"),
        (BASE.replace("budget;3", "budget;3.5"), "invalid-integer"),
        (BASE.replace("p2;1", "p2;0"), "invalid-cost"),
        (BASE.replace("p2;1", "p1;1"), "duplicate-id"),
        (BASE.replace("2;p1,p3,p4", "1;p1,p3,p4"), "duplicate-id"),
        (BASE.replace("budget;3\n", ""), "missing-meta-key"),
        (BASE + "META\n", "duplicate-section"),
        (BASE.replace("voter_id;vote", "voter;vote"), "missing-column"),
        ("hello\n" + BASE, "missing-section"),
        (b"\xff" + BASE.encode(), "encoding"),
        (BASE.replace("1;p1", "1;p1;extra"), "malformed-row"),
    ],
)
def test_diagnostics(text, code):
    with pytest.raises(PbParseError) as info:
        parse_pb(text)
    assert info.value.code == code
    assert info.value.to_dict()["code"] == code


def test_diagnostic_position():
    with pytest.raises(PbParseError) as info:
        parse_pb(BASE.replace("2;p1,p3,p4", "2;p1,p9"))
    assert info.value.line == 16
    assert info.value.column == 6


def test_write_rejects_unwritable_ids():
    inst = Instance.from_costs({"a;b": 1}, 1)
    with pytest.raises(ValueError):
        write_pb(inst, Profile())


@given(instance_and_profile(max_projects=6, max_cost=50, min_agents=0, max_agents=8))
def test_round_trip(case):
    inst, prof = case
    text = write_pb(inst, prof)
    assert to_instance_profile(parse_pb(text)) == (inst, prof)
    assert write_pb(*to_instance_profile(parse_pb(text))) == text


@given(st.binary(max_size=300))
def test_arbitrary_bytes_never_crash(data):
    try:
        parse_pb(data)
    except PbParseError:
        pass


@given(st.text(alphabet=st.sampled_from(list("METAPROJECTSVOTES;,\n 0123456789abp_-\"")), max_size=400))
def test_arbitrary_text_never_crashes(text):
    try:
        parse_pb(text)
    except PbParseError:
        pass


@given(st.data())
def test_mutated_files_never_crash(data):
    chars = list(A1)
    for _ in range(data.draw(st.integers(1, 5))):
        i = data.draw(st.integers(0, len(chars) - 1))
        chars[i] = data.draw(st.sampled_from(list(";,\n0x-p\"\x00")))
    try:
        parse_pb("".join(chars))
    except PbParseError:
        pass
