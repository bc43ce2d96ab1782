"""Model resolution by name: bundled definitions plus torchvision's zoo.

Bundled models mirror the reference (timm-style) module trees the matching
pipeline was designed around. They shadow same-named torchvision models;
prefix a name with "tv:" to force torchvision resolution.
"""

from __future__ import annotations

import torch.nn as nn

from .efficientnet import efficientnet_b0, efficientnet_b2
from .rexnet import ReXNet

LOCAL_MODELS = {
    "efficientnet_b0": efficientnet_b0,
    "efficientnet_b2": efficientnet_b2,
    "rexnet_100": ReXNet,
}


def _torchvision_model(name: str) -> nn.Module:
    try:
        from torchvision import models as tv_models
    except ImportError as e:
        raise ValueError(
            f"model {name!r} is not bundled and torchvision is not installed"
        ) from e
    try:
        return tv_models.get_model(name, weights=None)
    except ValueError as e:
        raise ValueError(f"unknown model {name!r}: {e}") from e


def create_model(name: str) -> nn.Module:
    if name.startswith("tv:"):
        return _torchvision_model(name[3:])
    if name in LOCAL_MODELS:
        return LOCAL_MODELS[name]()
    return _torchvision_model(name)


def available_models() -> list[str]:
    names = sorted(LOCAL_MODELS)
    try:
        from torchvision import models as tv_models

        names += sorted(set(tv_models.list_models()) - set(LOCAL_MODELS))
    except ImportError:
        pass
    return names
