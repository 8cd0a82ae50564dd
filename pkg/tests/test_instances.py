import json

import pytest

from onlinecover import check_time_monotone, generate, load_instance, save_instance
from onlinecover.baselines import marginal_bounds
from onlinecover.instances import APPENDIX_B_VALUES, Instance, InstanceError, verify_declared


def test_appendix_b_fixture():
    inst = generate("appendix-b")
    assert inst.labels == ["a", "b", "y"]
    assert inst.functions()[-1].table().tolist() == list(APPENDIX_B_VALUES)
    assert APPENDIX_B_VALUES == (0, 9, 1, 10, 1, 10, 2, 10)


def test_appendix_a_fixture():
    inst = generate("appendix-a", n=3)
    tables = [f.table().tolist() for f in inst.functions()]
    assert tables[0] == [0] * 8 and tables[2] == [0] * 8
    assert tables[1] == [m & 1 for m in range(8)]
    assert inst.properties["time-monotone"] is False


def test_set_cover_stream_deterministic():
    a = generate("set-cover-stream", n=10, T=25, density=0.3, seed=0)
    b = generate("set-cover-stream", n=10, T=25, density=0.3, seed=0)
    assert a.to_dict() == b.to_dict()
    assert a.fmin == a.fmax == 1
    assert all(any(ev["sets"][j] for j in range(10)) for ev in a.stream)


@pytest.mark.parametrize("kind", ["set-cover-stream", "prefix-coverage", "partition-matroid"])
@pytest.mark.parametrize("seed", range(3))
def test_generated_bounds_exact_and_declared(kind, seed):
    inst = generate(kind, n=7, T=9, seed=seed)
    fmin, fmax = marginal_bounds(inst.functions())
    if kind == "set-cover-stream":
        # declared bounds are the per-arrival marginals (one unit item per step)
        assert fmin == inst.fmin == inst.fmax == 1 and fmax <= len(inst.stream)
    else:
        assert (fmin, fmax) == (inst.fmin, inst.fmax)
    assert verify_declared(inst) == []
    assert check_time_monotone(inst.functions())


def test_roundtrip(tmp_path):
    inst = generate("prefix-coverage", n=6, T=5, seed=1)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    assert load_instance(path).to_dict() == inst.to_dict()
    assert set(json.loads(path.read_text())) >= {"n", "costs", "fmin", "fmax", "stream"}


def test_prefix_sum_semantics():
    inst = Instance(
        n=2,
        costs=[1, 1],
        fmin=1,
        fmax=1,
        stream=[
            {"kind": "coverage_increment", "sets": [[0], []]},
            {"kind": "coverage_increment", "sets": [[], [0]]},
        ],
    )
    f1, f2 = inst.functions()
    assert f1.value({0, 1}) == 1 and f2.value({0, 1}) == 2


def test_explicit_tables_replace():
    ev = {"kind": "explicit_table", "values": [0, 1, 1, 1]}
    inst = Instance(n=2, costs=[1, 1], fmin=1, fmax=1, stream=[ev, ev])
    assert inst.functions()[1].value({0}) == 1


def test_function_at():
    inst = generate("set-cover-stream", n=4, T=3, seed=0)
    assert inst.function_at(0).value(range(4)) == 0
    assert inst.function_at(3).value(range(4)) == 3
    with pytest.raises(InstanceError):
        inst.function_at(4)


@pytest.mark.parametrize(
    "patch",
    [
        {"n": 0},
        {"costs": [1, -1]},
        {"fmin": 0},
        {"stream": [{"kind": "bogus"}]},
        {"stream": [{"kind": "explicit_table", "values": [0, 1]}]},
        {"stream": [{"kind": "coverage_increment", "sets": [[0]], "mode": "x"}]},
    ],
)
def test_invalid_instances(patch):
    d = {"n": 2, "costs": [1, 1], "fmin": 1, "fmax": 1, "stream": [{"kind": "coverage_increment", "sets": [[0], [0]]}]}
    d.update(patch)
    with pytest.raises(InstanceError):
        Instance.from_dict(d)


def test_missing_field():
    with pytest.raises(InstanceError, match="costs"):
        Instance.from_dict({"n": 1, "fmin": 1, "fmax": 1})


def test_unknown_kind():
    with pytest.raises(ValueError):
        generate("nope")
