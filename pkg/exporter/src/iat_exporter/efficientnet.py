"""EfficientNet-B0/B2 for the local zoo.

The module tree mirrors the reference (timm-style) implementation: stem
conv/bn/act as direct children, a `blocks` container of per-stage
sequentials holding inverted-residual bottlenecks with inline
squeeze-excite, then head conv/bn/act, pooling and classifier. The
packaged torchvision variant nests each bottleneck inside an extra
`block` wrapper with a stochastic-depth sibling, which standardizes
poorly; these definitions keep the canonical structure. Widths follow
the compound-scaling rule (divisor 8), depths scale by ceil.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn

# (block type, kernel, stride, base channels, base repeats)
STAGES = [
    ("ds", 3, 1, 16, 1),
    ("ir", 3, 2, 24, 2),
    ("ir", 5, 2, 40, 2),
    ("ir", 3, 2, 80, 3),
    ("ir", 5, 1, 112, 3),
    ("ir", 5, 2, 192, 4),
    ("ir", 3, 1, 320, 1),
]
STEM_CHANNELS = 32
HEAD_CHANNELS = 1280
EXPAND_RATIO = 6
SE_RATIO = 0.25


def round_channels(channels: float, multiplier: float, divisor: int = 8) -> int:
    channels *= multiplier
    rounded = max(divisor, int(channels + divisor / 2) // divisor * divisor)
    if rounded < 0.9 * channels:
        rounded += divisor
    return rounded


class SqueezeExcite(nn.Module):
    """conv_reduce -> act -> conv_expand, sigmoid gate applied functionally."""

    def __init__(self, channels: int, reduced: int):
        super().__init__()
        self.conv_reduce = nn.Conv2d(channels, reduced, 1, bias=True)
        self.act1 = nn.SiLU(inplace=True)
        self.conv_expand = nn.Conv2d(reduced, channels, 1, bias=True)

    def forward(self, x):
        s = x.mean((2, 3), keepdim=True)
        s = self.conv_expand(self.act1(self.conv_reduce(s)))
        return x * torch.sigmoid(s)


class DepthwiseSeparableConv(nn.Module):
    def __init__(self, in_ch: int, out_ch: int, kernel: int, stride: int):
        super().__init__()
        self.conv_dw = nn.Conv2d(
            in_ch, in_ch, kernel, stride, padding=kernel // 2, groups=in_ch, bias=False
        )
        self.bn1 = nn.BatchNorm2d(in_ch)
        self.act1 = nn.SiLU(inplace=True)
        self.se = SqueezeExcite(in_ch, max(1, int(in_ch * SE_RATIO)))
        self.conv_pw = nn.Conv2d(in_ch, out_ch, 1, bias=False)
        self.bn2 = nn.BatchNorm2d(out_ch)
        self.has_skip = stride == 1 and in_ch == out_ch

    def forward(self, x):
        out = self.act1(self.bn1(self.conv_dw(x)))
        out = self.bn2(self.conv_pw(self.se(out)))
        return x + out if self.has_skip else out


class InvertedResidual(nn.Module):
    def __init__(self, in_ch: int, out_ch: int, kernel: int, stride: int, expand: int):
        super().__init__()
        mid = in_ch * expand
        self.conv_pw = nn.Conv2d(in_ch, mid, 1, bias=False)
        self.bn1 = nn.BatchNorm2d(mid)
        self.act1 = nn.SiLU(inplace=True)
        self.conv_dw = nn.Conv2d(
            mid, mid, kernel, stride, padding=kernel // 2, groups=mid, bias=False
        )
        self.bn2 = nn.BatchNorm2d(mid)
        self.act2 = nn.SiLU(inplace=True)
        self.se = SqueezeExcite(mid, max(1, int(in_ch * SE_RATIO)))
        self.conv_pwl = nn.Conv2d(mid, out_ch, 1, bias=False)
        self.bn3 = nn.BatchNorm2d(out_ch)
        self.has_skip = stride == 1 and in_ch == out_ch

    def forward(self, x):
        out = self.act1(self.bn1(self.conv_pw(x)))
        out = self.act2(self.bn2(self.conv_dw(out)))
        out = self.bn3(self.conv_pwl(self.se(out)))
        return x + out if self.has_skip else out


class EfficientNet(nn.Module):
    def __init__(self, width_mult: float = 1.0, depth_mult: float = 1.0, num_classes: int = 1000):
        super().__init__()
        stem = round_channels(STEM_CHANNELS, width_mult)
        self.conv_stem = nn.Conv2d(3, stem, 3, stride=2, padding=1, bias=False)
        self.bn1 = nn.BatchNorm2d(stem)
        self.act1 = nn.SiLU(inplace=True)

        stages = []
        in_ch = stem
        for block_type, kernel, stride, base_ch, base_n in STAGES:
            out_ch = round_channels(base_ch, width_mult)
            repeats = int(math.ceil(base_n * depth_mult))
            blocks = []
            for i in range(repeats):
                s = stride if i == 0 else 1
                if block_type == "ds":
                    blocks.append(DepthwiseSeparableConv(in_ch, out_ch, kernel, s))
                else:
                    blocks.append(InvertedResidual(in_ch, out_ch, kernel, s, EXPAND_RATIO))
                in_ch = out_ch
            stages.append(nn.Sequential(*blocks))
        self.blocks = nn.Sequential(*stages)

        head = round_channels(HEAD_CHANNELS, width_mult)
        self.conv_head = nn.Conv2d(in_ch, head, 1, bias=False)
        self.bn2 = nn.BatchNorm2d(head)
        self.act2 = nn.SiLU(inplace=True)
        self.global_pool = nn.AdaptiveAvgPool2d(1)
        self.classifier = nn.Linear(head, num_classes)

    def forward(self, x):
        x = self.act1(self.bn1(self.conv_stem(x)))
        x = self.blocks(x)
        x = self.act2(self.bn2(self.conv_head(x)))
        x = self.global_pool(x).flatten(1)
        return self.classifier(x)


def efficientnet_b0() -> EfficientNet:
    return EfficientNet(width_mult=1.0, depth_mult=1.0)


def efficientnet_b2() -> EfficientNet:
    return EfficientNet(width_mult=1.1, depth_mult=1.2)
