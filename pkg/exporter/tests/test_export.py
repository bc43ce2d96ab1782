import json

import pytest
import torch
import torch.nn as nn

from iat_exporter import create_model, export_model, import_weights
from iat_exporter.formats import read_weights


def state_equal(a: nn.Module, b: nn.Module) -> bool:
    sa, sb = a.state_dict(), b.state_dict()
    if set(sa) != set(sb):
        return False
    return all(torch.equal(sa[k], sb[k]) for k in sa)


def test_two_layer_sequential_export():
    model = nn.Sequential(nn.Conv2d(3, 8, 3), nn.Conv2d(8, 4, 1, bias=False))
    result = export_model(model, "twoconv")
    obj = json.loads(result.descriptor)
    assert obj["format_version"] == 1 and obj["name"] == "twoconv"
    layers = obj["root"]["children"]
    assert [l["layer_type"] for l in layers] == ["conv2d", "conv2d"]
    assert layers[0]["params"]["weight"] == [8, 3, 3, 3]
    assert layers[0]["params"]["bias"] == [8]
    assert layers[1]["params"]["bias"] is None
    tensors = read_weights(result.weights)
    assert set(tensors) == {"0/weight", "0/bias", "1/weight"}
    assert result.warnings == []


def test_classification_covers_common_layers():
    model = nn.Sequential(
        nn.Conv2d(3, 4, 3),
        nn.BatchNorm2d(4),
        nn.ReLU(),
        nn.MaxPool2d(2),
        nn.Identity(),
        nn.Flatten(),
        nn.Linear(16, 2),
    )
    obj = json.loads(export_model(model, "mix").descriptor)
    kinds = [l["layer_type"] for l in obj["root"]["children"]]
    assert kinds == ["conv2d", "batchnorm2d", "activation", "pool", "identity", "opaque", "linear"]


def test_batchnorm_exports_running_stats():
    model = nn.Sequential(nn.BatchNorm2d(6))
    model[0].running_mean.fill_(3.5)
    result = export_model(model, "bn")
    tensors = read_weights(result.weights)
    assert set(tensors) == {"0/weight", "0/bias", "0/running_mean", "0/running_var"}
    assert tensors["0/running_mean"][0] == 3.5


def test_parameterized_unknown_layer_becomes_opaque_with_warning():
    model = nn.Sequential(nn.Conv3d(1, 2, 3), nn.PReLU(4))
    result = export_model(model, "odd")
    obj = json.loads(result.descriptor)
    kinds = [l["layer_type"] for l in obj["root"]["children"]]
    assert kinds == ["opaque", "opaque"]
    assert any("exported as opaque" in w for w in result.warnings)
    # role-named tensors of opaque leaves are still exported
    tensors = read_weights(result.weights)
    assert "0/weight" in tensors and "0/bias" in tensors
    assert "1/weight" in tensors


def test_override_map_changes_classification():
    model = nn.Sequential(nn.Dropout(0.1))
    default = json.loads(export_model(model, "d").descriptor)
    assert default["root"]["children"][0]["layer_type"] == "opaque"
    overridden = json.loads(export_model(model, "d", {"Dropout": "identity"}).descriptor)
    assert overridden["root"]["children"][0]["layer_type"] == "identity"


def test_export_order_stable(b0_export):
    again = export_model(create_model("efficientnet_b0"), "efficientnet_b0")
    assert again.descriptor == b0_export.descriptor
    # weight bytes differ (random init) but the key layout must not
    a = sorted(read_weights(again.weights))
    b = sorted(read_weights(b0_export.weights))
    assert a == b


def test_roundtrip_bundled_b0(b0_export):
    fresh = create_model("efficientnet_b0")
    reference = create_model("efficientnet_b0")
    report = import_weights(fresh, b0_export.weights)
    assert report.unmatched == [] and report.missing == []
    source = create_model("efficientnet_b0")
    report2 = import_weights(source, b0_export.weights)
    assert report2.assigned == report.assigned
    assert state_equal(fresh, source)
    assert not state_equal(fresh, reference)  # fresh init differs from export


def test_roundtrip_torchvision_b0():
    pytest.importorskip("torchvision")
    model = create_model("tv:efficientnet_b0")
    exported = export_model(model, "tv_b0")
    other = create_model("tv:efficientnet_b0")
    report = import_weights(other, exported.weights)
    assert report.unmatched == [] and report.missing == []
    # re-export reproduces the identical container byte for byte
    assert export_model(other, "tv_b0").weights == exported.weights


def test_renamed_key_reported_unmatched(b0_export):
    tensors = read_weights(b0_export.weights)
    key = sorted(tensors)[0]
    tensors["zzz/renamed/weight"] = tensors.pop(key)
    from iat_exporter.formats import weights_bytes

    model = create_model("efficientnet_b0")
    report = import_weights(model, weights_bytes(tensors))
    assert report.unmatched == ["zzz/renamed/weight"]
    assert report.missing == [key]


def test_empty_weight_file_reports_all_keys():
    from iat_exporter.formats import weights_bytes

    model = nn.Sequential(nn.Conv2d(3, 4, 3))
    before = [p.clone() for p in model.parameters()]
    report = import_weights(model, weights_bytes({}))
    assert report.assigned == [] and report.unmatched == []
    assert report.missing == ["0/bias", "0/weight"]
    for p, q in zip(model.parameters(), before):
        assert torch.equal(p, q)


def test_shape_mismatch_names_path():
    from iat_exporter.formats import weights_bytes

    model = nn.Sequential(nn.Conv2d(3, 4, 3, bias=False))
    import numpy as np

    with pytest.raises(ValueError, match="0/weight"):
        import_weights(model, weights_bytes({"0/weight": np.zeros((9, 9), dtype=np.float32)}))


def test_bundled_models_forward():
    for name, size in (("efficientnet_b0", 64), ("rexnet_100", 64)):
        model = create_model(name).eval()
        with torch.no_grad():
            out = model(torch.randn(1, 3, size, size))
        assert out.shape == (1, 1000)
