import numpy as np
import pytest

from dynaprop import (
    ADD_EDGE,
    DELETE_EDGE,
    RunConfig,
    StreamFormatError,
    WeightedDynamicGraph,
    parse_event_stream,
    parse_snapshot_file,
    parse_snapshots,
    write_event_stream,
)
from dynaprop.streams import load_features, singleton_batches

SEVEN_EVENT_FILE = """\
1\t+\t0\t4\t1
1\t+\t1\t3\t1
2\t+\t0\t3\t1
2\t+\t2\t3\t1
3\t+\t2\t4\t1
4\t-\t2\t3\t1
5\t+\t0\t2\t1
"""


def test_seven_event_file_groups_into_five_batches(tmp_path):
    path = tmp_path / "ev.tsv"
    path.write_text(SEVEN_EVENT_FILE)
    batches = parse_event_stream(path)
    assert [t for t, _ in batches] == [1, 2, 3, 4, 5]
    assert [len(evs) for _, evs in batches] == [2, 2, 1, 1, 1]
    assert batches[3][1][0].kind == DELETE_EDGE
    assert batches[0][1][0].kind == ADD_EDGE


def test_empty_file_is_empty_stream(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("")
    assert parse_event_stream(path) == []


def test_duplicate_add_lines_accumulate_weight(tmp_path):
    path = tmp_path / "dup.tsv"
    path.write_text("1\t+\t0\t1\t1\n1\t+\t0\t1\t1\n")
    batches = parse_event_stream(path)
    g = WeightedDynamicGraph(2)
    for _, events in batches:
        g.apply_events(events)
    assert g.edge_weight(0, 1) == 2.0


def test_malformed_line_reports_position(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("1\t+\t0\t1\t1\nbogus line\n")
    with pytest.raises(StreamFormatError, match=r"bad\.tsv:2"):
        parse_event_stream(path)


def test_unknown_op_rejected(tmp_path):
    path = tmp_path / "op.tsv"
    path.write_text("1\t*\t0\t1\t1\n")
    with pytest.raises(StreamFormatError, match="unknown op"):
        parse_event_stream(path)


def test_time_regression_rejected(tmp_path):
    path = tmp_path / "reg.tsv"
    path.write_text("2\t+\t0\t1\t1\n1\t+\t1\t2\t1\n")
    with pytest.raises(StreamFormatError, match="regresses"):
        parse_event_stream(path)


def test_event_stream_round_trip(tmp_path):
    path = tmp_path / "ev.tsv"
    path.write_text(SEVEN_EVENT_FILE)
    batches = parse_event_stream(path)
    out = tmp_path / "copy.tsv"
    write_event_stream(batches, out)
    again = parse_event_stream(out)
    assert again == batches


def test_parse_snapshot_file(tmp_path):
    path = tmp_path / "snap.tsv"
    path.write_text("0 1 2.0\n1 2\n# comment\n\n0 1 0.5\n")
    edges = parse_snapshot_file(path)
    assert edges == [(0, 1, 2.0), (1, 2, 1.0), (0, 1, 0.5)]
    g = WeightedDynamicGraph.from_edges(edges)
    assert g.edge_weight(0, 1) == 2.5


def test_parse_snapshots_directory_order(tmp_path):
    (tmp_path / "01.tsv").write_text("0 1 1\n")
    (tmp_path / "00.tsv").write_text("0 1 1\n1 2 1\n")
    snaps = parse_snapshots(tmp_path)
    assert len(snaps) == 2
    assert len(snaps[0]) == 2 and len(snaps[1]) == 1
    with pytest.raises(FileNotFoundError):
        parse_snapshots(tmp_path / "missing")


def test_singleton_batches_preserve_order(tmp_path):
    path = tmp_path / "ev.tsv"
    path.write_text(SEVEN_EVENT_FILE)
    singles = singleton_batches(parse_event_stream(path))
    assert len(singles) == 7
    assert [t for t, _ in singles] == [1, 1, 2, 2, 3, 4, 5]


def test_load_features_npy_and_text(tmp_path, rng):
    x = rng.uniform(-1, 1, (4, 3))
    np.save(tmp_path / "x.npy", x)
    np.testing.assert_array_equal(load_features(tmp_path / "x.npy"), x)
    (tmp_path / "x.tsv").write_text(
        "\n".join("\t".join(repr(float(v)) for v in row) for row in x)
    )
    np.testing.assert_array_equal(load_features(tmp_path / "x.tsv"), x)


def test_run_config_defaults_and_schedules():
    cfg = RunConfig()
    assert (cfg.alpha, cfg.beta, cfg.r_max) == (0.2, 0.5, 1e-7)
    assert [s.tag for s in cfg.schedules()] == ["ppr"]
    both = RunConfig(filter="both")
    assert [s.tag for s in both.schedules()] == ["ppr", "highpass"]
    high = RunConfig(filter="highpass").schedules()[0]
    assert high.gamma == pytest.approx(-0.8)


def test_run_config_validation_messages():
    with pytest.raises(ValueError, match="r_max"):
        RunConfig(r_max=0.0)
    with pytest.raises(ValueError, match="alpha"):
        RunConfig(alpha=1.0)
    with pytest.raises(ValueError, match="beta"):
        RunConfig(beta=-0.1)
    with pytest.raises(ValueError, match="filter"):
        RunConfig(filter="bandpass")
    with pytest.raises(ValueError, match="mutually exclusive"):
        RunConfig(lazy=True, eager=True)
