"""Layer-kind classification by module class name.

The allowlist covers the torch.nn layers the descriptor format models
directly; anything else becomes "opaque" (kept in the tree, never matched).
An override map `{class_name: kind}` can extend or correct the defaults,
since frameworks keep adding layer types.
"""

from __future__ import annotations

import torch.nn as nn

KINDS = ("conv2d", "batchnorm2d", "linear", "activation", "pool", "identity", "opaque")

DEFAULT_CLASS_KINDS: dict[str, str] = {
    "Conv2d": "conv2d",
    "BatchNorm2d": "batchnorm2d",
    "Linear": "linear",
    "NonDynamicallyQuantizableLinear": "linear",
    "Identity": "identity",
    # activations
    "ReLU": "activation",
    "ReLU6": "activation",
    "LeakyReLU": "activation",
    "SiLU": "activation",
    "GELU": "activation",
    "ELU": "activation",
    "CELU": "activation",
    "SELU": "activation",
    "Mish": "activation",
    "Hardswish": "activation",
    "Hardsigmoid": "activation",
    "Hardtanh": "activation",
    "Sigmoid": "activation",
    "Tanh": "activation",
    "Softmax": "activation",
    "LogSoftmax": "activation",
    # pooling
    "MaxPool2d": "pool",
    "AvgPool2d": "pool",
    "AdaptiveAvgPool2d": "pool",
    "AdaptiveMaxPool2d": "pool",
    "LPPool2d": "pool",
    "SelectAdaptivePool2d": "pool",
}


def classify(module: nn.Module, overrides: dict[str, str] | None = None) -> str:
    name = type(module).__name__
    if overrides and name in overrides:
        kind = overrides[name]
        if kind not in KINDS:
            raise ValueError(f"override maps {name!r} to unknown kind {kind!r}")
        return kind
    return DEFAULT_CLASS_KINDS.get(name, "opaque")
