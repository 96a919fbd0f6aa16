"""Pipeline config, report generation and the command-line surface."""

import json
import subprocess
import sys

import pytest

from commchar.cli import main
from commchar.errors import ConfigError, InvalidSupportError
from commchar.pipeline import PipelineConfig, run_pipeline

from conftest import write_planted_files

SMALL_CONFIG = """\
theta = 2

[descriptor.icml]
kind = "attribute"
bins = [1, 2, 3, 4]
"""

SMALL_EDGES = """\
slice,src,dst
0,a,b
0,b,c
0,a,c
0,c,d
1,a,b
1,d,e
1,e,f
1,d,f
"""

SMALL_ATTRS = """\
node,slice,descriptor,value
a,0,icml,1
b,0,icml,2
a,1,icml,1
"""


@pytest.fixture
def small_files(tmp_path):
    edges = tmp_path / "edges.csv"
    attrs = tmp_path / "attrs.csv"
    config = tmp_path / "net.toml"
    edges.write_text(SMALL_EDGES)
    attrs.write_text(SMALL_ATTRS)
    config.write_text(SMALL_CONFIG)
    return {"edges": edges, "attrs": attrs, "config": config, "dir": tmp_path}


def test_config_validation():
    cfg = PipelineConfig(edges="e", config="c", min_sup="1.5")
    with pytest.raises(InvalidSupportError):
        cfg.validate()
    with pytest.raises(ConfigError):
        PipelineConfig(edges="e", config="c", max_uncovered=-1).validate()
    with pytest.raises(ConfigError):
        PipelineConfig(edges="e", config="c", distance_anchor="middle").validate()
    with pytest.raises(ConfigError):
        PipelineConfig(edges="e", config="c", threads=0).validate()


def test_config_round_trip():
    cfg = PipelineConfig(
        edges="e.csv", config="c.toml", attrs="a.csv", seed=3, min_sup="0.4",
        max_length=4, report_out="r.json",
    )
    assert PipelineConfig.from_dict(cfg.to_dict()) == cfg
    defaults = PipelineConfig(edges="e", config="c")
    assert defaults.min_sup == "0.3"
    assert defaults.max_uncovered == 5
    assert defaults.min_community_size == 10


def test_run_pipeline_dry_run(small_files, tmp_path):
    out = tmp_path / "report.json"
    cfg = PipelineConfig(
        edges=str(small_files["edges"]),
        config=str(small_files["config"]),
        attrs=str(small_files["attrs"]),
        report_out=str(out),
        dry_run=True,
    )
    report = run_pipeline(cfg)
    assert report["dry_run"] is True
    assert not out.exists()


def test_run_pipeline_small(small_files, tmp_path):
    out = tmp_path / "report.json"
    cfg = PipelineConfig(
        edges=str(small_files["edges"]),
        config=str(small_files["config"]),
        attrs=str(small_files["attrs"]),
        min_sup="0.5",
        min_community_size=3,
        report_out=str(out),
        partition_out=str(tmp_path / "part.csv"),
        measures_out=str(tmp_path / "measures.csv"),
        patterns_out=str(tmp_path / "patterns.jsonl"),
    )
    report = run_pipeline(cfg)
    assert out.exists()
    assert (tmp_path / "part.csv").read_text().startswith("node,community\n")
    assert (tmp_path / "measures.csv").read_text().startswith("node,slice,measure,value,bin\n")
    assert report["network"]["nodes"] == 6
    assert report["communities"]["count"] >= 1
    for line in (tmp_path / "patterns.jsonl").read_text().splitlines():
        row = json.loads(line)
        assert {"community", "sequence", "support", "growth_rate", "supporters"} <= set(row)


def test_report_fields_trace_to_modules(planted_files, tmp_path):
    out = tmp_path / "report.json"
    cfg = PipelineConfig(
        edges=str(planted_files["edges"]),
        config=str(planted_files["config"]),
        attrs=str(planted_files["attrs"]),
        report_out=str(out),
    )
    report = run_pipeline(cfg)
    assert report["communities"]["count"] == 3
    assert len(report["characterizations"]) == 3
    for c in report["characterizations"]:
        assert c["size"] == 40
        assert c["top_support"]["support"] >= 0.3
        covered = c["covered"]
        assert covered + len(c["deviants"]) == c["size"]
        # trace accounting: newly covered sums to the covered total
        assert sum(s["newly_covered"] for s in c["coverage_trace"]) == covered


def test_cli_communities(small_files, capsys, tmp_path):
    out = tmp_path / "part.csv"
    rc = main([
        "communities",
        "--edges", str(small_files["edges"]),
        "--config", str(small_files["config"]),
        "--out", str(out),
    ])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "node,community"
    assert len(lines) == 7
    assert "modularity:" in capsys.readouterr().out


def test_cli_measures_builddb_mine(small_files, tmp_path, capsys):
    rc = main([
        "measures",
        "--edges", str(small_files["edges"]),
        "--config", str(small_files["config"]),
        "--attrs", str(small_files["attrs"]),
        "--out", str(tmp_path / "m.csv"),
    ])
    assert rc == 0
    db_path = tmp_path / "db.tsv"
    rc = main([
        "builddb",
        "--edges", str(small_files["edges"]),
        "--config", str(small_files["config"]),
        "--attrs", str(small_files["attrs"]),
        "--out", str(db_path),
    ])
    assert rc == 0
    assert db_path.exists()
    patterns_path = tmp_path / "p.jsonl"
    rc = main([
        "mine",
        "--db", str(db_path),
        "--min-sup", "0.5",
        "--min-community-size", "2",
        "--out", str(patterns_path),
    ])
    assert rc == 0
    rows = [json.loads(l) for l in patterns_path.read_text().splitlines()]
    assert rows, "expected at least one mined pattern"
    for row in rows:
        assert 0 < row["support"] <= 1


def test_cli_mine_single_community_too_small(small_files, tmp_path, capsys):
    db_path = tmp_path / "db.tsv"
    main([
        "builddb",
        "--edges", str(small_files["edges"]),
        "--config", str(small_files["config"]),
        "--attrs", str(small_files["attrs"]),
        "--out", str(db_path),
    ])
    rc = main([
        "mine", "--db", str(db_path), "--community", "0",
        "--min-community-size", "99",
    ])
    assert rc == 1
    assert "CommunityTooSmall" in capsys.readouterr().err


def test_cli_rejects_bad_min_sup(small_files, tmp_path, capsys):
    rc = main([
        "characterize",
        "--edges", str(small_files["edges"]),
        "--config", str(small_files["config"]),
        "--min-sup", "1.01",
        "--out", str(tmp_path / "r.json"),
    ])
    assert rc == 1
    assert "InvalidSupport" in capsys.readouterr().err


def test_cli_dry_run_writes_nothing(small_files, tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main([
        "characterize",
        "--edges", str(small_files["edges"]),
        "--config", str(small_files["config"]),
        "--dry-run",
        "--out", str(out),
    ])
    assert rc == 0
    assert not out.exists()
    assert "dry run ok" in capsys.readouterr().out


def test_cli_characterize_and_report(planted_files, tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main([
        "characterize",
        "--edges", str(planted_files["edges"]),
        "--config", str(planted_files["config"]),
        "--attrs", str(planted_files["attrs"]),
        "--out", str(out),
    ])
    assert rc == 0
    capsys.readouterr()
    rc = main(["report", "--report", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "communities: 3" in text
    assert text.count("community ") == 3


def test_cli_missing_file_is_clean_error(tmp_path, capsys):
    rc = main([
        "communities",
        "--edges", str(tmp_path / "nope.csv"),
        "--config", str(tmp_path / "nope.toml"),
    ])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_reports_byte_identical_across_runs(tmp_path):
    files = write_planted_files(tmp_path, seed=7)
    out = tmp_path / "report.json"
    cfg = PipelineConfig(
        edges=str(files["edges"]),
        config=str(files["config"]),
        attrs=str(files["attrs"]),
        report_out=str(out),
        patterns_out=str(tmp_path / "patterns.jsonl"),
    )
    run_pipeline(cfg)
    first_report = out.read_bytes()
    first_patterns = (tmp_path / "patterns.jsonl").read_bytes()
    run_pipeline(cfg)
    assert out.read_bytes() == first_report
    assert (tmp_path / "patterns.jsonl").read_bytes() == first_patterns


def test_threads_and_anchor_modes_match_default(tmp_path, monkeypatch):
    files = write_planted_files(tmp_path, seed=7)
    base = dict(
        edges=str(files["edges"]),
        config=str(files["config"]),
        attrs=str(files["attrs"]),
    )
    serial = run_pipeline(PipelineConfig(**base))
    threaded = run_pipeline(PipelineConfig(**base, threads=4))
    strip = lambda report: {k: v for k, v in report.items() if k != "config"}
    assert strip(serial) == strip(threaded)
    # anchor mode changes only how extra picks are chosen, never the seed
    first_anchor = run_pipeline(PipelineConfig(**base, distance_anchor="first"))
    for a, b in zip(serial["characterizations"], first_anchor["characterizations"]):
        assert a["selected"][0] == b["selected"][0]
    # maximal patterns are a subset of the closed ones
    maximal = run_pipeline(PipelineConfig(**base, maximal=True))
    for a, b in zip(serial["characterizations"], maximal["characterizations"]):
        assert b["top_support"]["support"] <= a["top_support"]["support"] + 1e-12


def test_cli_threads_env_var(small_files, tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("COMMCHAR_THREADS", "3")
    out = tmp_path / "r.json"
    rc = main([
        "characterize",
        "--edges", str(small_files["edges"]),
        "--config", str(small_files["config"]),
        "--attrs", str(small_files["attrs"]),
        "--min-community-size", "3",
        "--out", str(out),
    ])
    assert rc == 0
    assert json.loads(out.read_text())["config"]["threads"] == 3


def test_console_entry_point(small_files, tmp_path):
    proc = subprocess.run(
        [
            sys.executable, "-m", "commchar.cli",
            "communities",
            "--edges", str(small_files["edges"]),
            "--config", str(small_files["config"]),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "modularity" in proc.stdout
