import json
import math
import subprocess
import sys

import numpy as np
import pytest

from iat.cli import main
from iat.core import TensorRole, tensor_key
from iat.model_io import load_weights, save_descriptor, save_weights
from iat.standardize import standardize
from iat.synthetic import (
    bn,
    conv,
    conv_stack,
    descriptor,
    efficientnet_style,
    random_weights,
    rexnet_style,
)


def run_cli(args):
    try:
        return main(args)
    except SystemExit as exc:  # argparse usage errors
        return exc.code


@pytest.fixture
def arches(tmp_path):
    paths = {}
    for desc in (efficientnet_style("eff"), rexnet_style("rex")):
        p = tmp_path / f"{desc.name}.json"
        p.write_bytes(save_descriptor(desc))
        paths[desc.name] = p
    return paths


def test_standardize_text_output(arches, capsys):
    assert run_cli(["standardize", str(arches["eff"])]) == 0
    out = capsys.readouterr().out
    assert "block 0 (1 layers):" in out
    assert "conv_stem (conv2d)" in out
    assert "classifier (linear)" in out


def test_standardize_json_matches_block_structure(arches, capsys):
    assert run_cli(["standardize", str(arches["eff"]), "--json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    net = standardize(efficientnet_style("eff").root)
    assert [len(b["layers"]) for b in obj["blocks"]] == [len(b.layers) for b in net.blocks]
    assert obj["blocks"][0]["layers"][0] == {"path": "conv_stem", "kind": "conv2d"}
    # stem singles, bottleneck blocks, head singles
    assert [len(b["layers"]) for b in obj["blocks"]] == [1, 1, 1, 5, 11, 11, 11, 11, 1, 1, 1, 1, 1]


def test_standardize_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert run_cli(["standardize", str(empty)]) == 2
    assert "error" in capsys.readouterr().err


def test_standardize_missing_file(tmp_path, capsys):
    assert run_cli(["standardize", str(tmp_path / "nope.json")]) == 2


def test_similarity_same_file_is_one(arches, capsys):
    assert run_cli(["similarity", str(arches["eff"]), str(arches["eff"])]) == 0
    assert capsys.readouterr().out.strip() == "1.0000"


def test_similarity_disjoint_kinds_is_zero(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_bytes(save_descriptor(descriptor("a", (conv("c0", 8, 4), conv("c1", 8, 8)))))
    b.write_bytes(save_descriptor(descriptor("b", (bn("n0", 8), bn("n1", 8)))))
    assert run_cli(["similarity", str(a), str(b)]) == 0
    assert capsys.readouterr().out.strip() == "0.0000"


def test_match_self_reports_layer_count(arches, capsys):
    assert run_cli(["match", str(arches["eff"]), str(arches["eff"])]) == 0
    obj = json.loads(capsys.readouterr().out)
    count = len(standardize(efficientnet_style("eff").root).matchable_layers())
    assert obj["network_score"] == count
    assert len(obj["pairs"]) == count
    assert all(p["target_path"] == p["source_path"] for p in obj["pairs"])


def test_match_out_file_and_keys(arches, tmp_path):
    out = tmp_path / "matching.json"
    assert run_cli(["match", str(arches["rex"]), str(arches["eff"]), "--out", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert set(obj) == {"pairs", "network_score"}
    assert all(set(p) == {"target_path", "source_path", "score"} for p in obj["pairs"])


def test_match_unknown_matcher_usage_error(arches, capsys):
    assert run_cli(["match", str(arches["eff"]), str(arches["eff"]), "--matcher", "best"]) == 2


def test_match_seeded_random_deterministic(arches, tmp_path):
    out1, out2 = tmp_path / "m1.json", tmp_path / "m2.json"
    for out in (out1, out2):
        assert run_cli([
            "match", str(arches["rex"]), str(arches["eff"]),
            "--matcher", "random", "--seed", "7", "--out", str(out),
        ]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_transfer_self_with_init_recovers_source(arches, tmp_path):
    desc = efficientnet_style("eff")
    weights = random_weights(desc, np.random.default_rng(0))
    src = tmp_path / "src.iatw"
    src.write_bytes(save_weights(weights))
    out = tmp_path / "out.iatw"
    report = tmp_path / "report.json"
    code = run_cli([
        "transfer",
        "--target-arch", str(arches["eff"]),
        "--source-arch", str(arches["eff"]),
        "--source-weights", str(src),
        "--init", "fan-in-uniform",
        "--seed", "11",
        "--out", str(out),
        "--report", str(report),
    ])
    assert code == 0
    result = load_weights(out.read_bytes())
    assert set(result.entries) == set(weights.entries)
    for key in weights.entries:
        assert result.entries[key] == weights.entries[key], key
    rep = json.loads(report.read_text())
    assert rep["overall_fraction"] == 1.0
    assert rep["warnings"] == []


def test_transfer_requires_target_weights_or_init(arches, tmp_path, capsys):
    src = tmp_path / "src.iatw"
    src.write_bytes(save_weights(random_weights(efficientnet_style("eff"), np.random.default_rng(0))))
    code = run_cli([
        "transfer",
        "--target-arch", str(arches["eff"]),
        "--source-arch", str(arches["eff"]),
        "--source-weights", str(src),
        "--out", str(tmp_path / "out.iatw"),
    ])
    assert code == 2
    assert "target-weights" in capsys.readouterr().err


def test_transfer_validation_failure_exits_2(arches, tmp_path, capsys):
    # weights that do not match the declared source architecture
    wrong = random_weights(rexnet_style("rex"), np.random.default_rng(0))
    src = tmp_path / "src.iatw"
    src.write_bytes(save_weights(wrong))
    code = run_cli([
        "transfer",
        "--target-arch", str(arches["eff"]),
        "--source-arch", str(arches["eff"]),
        "--source-weights", str(src),
        "--init", "fan-in-uniform",
        "--out", str(tmp_path / "out.iatw"),
    ])
    assert code == 2
    assert "orphan" in capsys.readouterr().err


def test_transfer_report_fractions_match_shape_rule(tmp_path):
    target_desc = conv_stack("tgt", (3, 8, 6), bias=False)
    source_desc = conv_stack("src", (4, 4, 12), bias=False)
    t_arch, s_arch = tmp_path / "t.json", tmp_path / "s.json"
    t_arch.write_bytes(save_descriptor(target_desc))
    s_arch.write_bytes(save_descriptor(source_desc))
    src = tmp_path / "s.iatw"
    src.write_bytes(save_weights(random_weights(source_desc, np.random.default_rng(1))))
    report = tmp_path / "rep.json"
    code = run_cli([
        "transfer",
        "--target-arch", str(t_arch),
        "--source-arch", str(s_arch),
        "--source-weights", str(src),
        "--init", "fan-in-uniform", "--seed", "0",
        "--out", str(tmp_path / "o.iatw"),
        "--report", str(report),
    ])
    assert code == 0
    rep = json.loads(report.read_text())
    by_key = {e["target"]: e for e in rep["tensors"]}
    t_shapes = {l.path: l.weight.shape for l in target_desc.layers()}
    s_shapes = {l.path: l.weight.shape for l in source_desc.layers()}
    for entry in rep["tensors"]:
        path = entry["target"].rsplit("/", 1)[0]
        expect = math.prod(min(a, b) for a, b in zip(t_shapes[path], s_shapes[path]))
        assert entry["copied"] == expect
        assert entry["fraction"] == pytest.approx(expect / math.prod(t_shapes[path]))


def test_transfer_deterministic_given_seed(arches, tmp_path):
    src = tmp_path / "src.iatw"
    src.write_bytes(save_weights(random_weights(rexnet_style("rex"), np.random.default_rng(2))))
    outs = []
    for name in ("o1.iatw", "o2.iatw"):
        out = tmp_path / name
        assert run_cli([
            "transfer",
            "--target-arch", str(arches["eff"]),
            "--source-arch", str(arches["rex"]),
            "--source-weights", str(src),
            "--init", "fan-in-uniform", "--seed", "5",
            "--transfer", "magnitude",
            "--out", str(out),
        ]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_match_score_equals_oracle_on_tiny_fixture(tmp_path, capsys):
    from iat.align import ScoreTable, brute_force_match
    from iat.scoring import score_table

    t_desc = descriptor("t", (conv("c0", 8, 3), bn("n0", 8), conv("c1", 16, 8)))
    s_desc = descriptor("s", (conv("c0", 12, 3), bn("n0", 12), conv("c1", 20, 12)))
    t_path, s_path = tmp_path / "t.json", tmp_path / "s.json"
    t_path.write_bytes(save_descriptor(t_desc))
    s_path.write_bytes(save_descriptor(s_desc))
    assert run_cli(["match", str(t_path), str(s_path)]) == 0
    obj = json.loads(capsys.readouterr().out)

    target, source = standardize(t_desc.root), standardize(s_desc.root)
    block_scores = np.zeros((len(target.blocks), len(source.blocks)))
    for i, tb in enumerate(target.blocks):
        for j, sb in enumerate(source.blocks):
            tl, sl = tb.matchable_layers(), sb.matchable_layers()
            if tl and sl:
                block_scores[i, j] = brute_force_match(score_table(tl, sl)).value
    oracle = brute_force_match(ScoreTable(block_scores)).value
    assert obj["network_score"] == pytest.approx(oracle, abs=1e-9)


def test_transfer_init_values_respect_fan_in_bound(tmp_path):
    # no layer kinds in common: every output tensor comes from --init
    target_desc = descriptor("t", (conv("c0", 8, 3), conv("c1", 8, 8)))
    source_desc = descriptor("s", (bn("n0", 8), bn("n1", 8)))
    t_arch, s_arch = tmp_path / "t.json", tmp_path / "s.json"
    t_arch.write_bytes(save_descriptor(target_desc))
    s_arch.write_bytes(save_descriptor(source_desc))
    src = tmp_path / "s.iatw"
    src.write_bytes(save_weights(random_weights(source_desc, np.random.default_rng(0))))
    out = tmp_path / "out.iatw"
    report = tmp_path / "rep.json"
    assert run_cli([
        "transfer",
        "--target-arch", str(t_arch),
        "--source-arch", str(s_arch),
        "--source-weights", str(src),
        "--init", "fan-in-uniform", "--seed", "3",
        "--out", str(out),
        "--report", str(report),
    ]) == 0
    assert json.loads(report.read_text())["total_copied"] == 0
    result = load_weights(out.read_bytes())
    for layer in target_desc.layers():
        bound = math.sqrt(6.0 / math.prod(layer.weight.shape[1:]))
        for spec in layer.params:
            values = result.get(layer.path, spec.role).data
            assert np.all(np.abs(values) <= bound), layer.path
    # a quarter of the bound should be exceeded somewhere: values are not degenerate
    w = result.get("c0", TensorRole.WEIGHT).data
    assert np.abs(w).max() > 0.25 * math.sqrt(6.0 / 27)


def test_console_script_entry_point(arches):
    proc = subprocess.run(
        [sys.executable, "-m", "iat.cli", "similarity", str(arches["eff"]), str(arches["eff"])],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1.0000"
