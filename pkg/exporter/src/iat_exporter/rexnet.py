"""ReXNet-1.0 (Han et al., "Rethinking Channel Dimensions") for the local zoo.

Bundled because the packaged torchvision zoo does not ship ReXNet. The
structure follows the reference implementation: a conv/bn/silu stem, 16
linear bottlenecks whose output widths grow linearly (16 -> 185), channel
expansion x6 after the first block, squeeze-excite from the fourth block
on, and a 1280-wide head before the classifier.
"""

from __future__ import annotations

import torch.nn as nn

CHANNELS = [16, 27, 38, 50, 61, 72, 84, 95, 106, 117, 128, 140, 151, 162, 174, 185]
STAGE_LAYERS = [1, 2, 2, 3, 3, 5]
STAGE_STRIDES = [1, 2, 2, 2, 1, 2]
STAGE_USE_SE = [False, False, True, True, True, True]
STEM_CHANNELS = 32
HEAD_CHANNELS = 1280
SE_DIVISOR = 12


class ConvBnAct(nn.Module):
    def __init__(self, in_ch, out_ch, kernel=3, stride=1, groups=1):
        super().__init__()
        self.conv = nn.Conv2d(
            in_ch, out_ch, kernel, stride, padding=kernel // 2, groups=groups, bias=False
        )
        self.bn = nn.BatchNorm2d(out_ch)
        self.act = nn.SiLU(inplace=True)

    def forward(self, x):
        return self.act(self.bn(self.conv(x)))


class ConvBn(nn.Module):
    def __init__(self, in_ch, out_ch, kernel=1, stride=1, groups=1):
        super().__init__()
        self.conv = nn.Conv2d(
            in_ch, out_ch, kernel, stride, padding=kernel // 2, groups=groups, bias=False
        )
        self.bn = nn.BatchNorm2d(out_ch)

    def forward(self, x):
        return self.bn(self.conv(x))


class SqueezeExcite(nn.Module):
    def __init__(self, channels, divisor=SE_DIVISOR):
        super().__init__()
        squeezed = max(channels // divisor, 1)
        self.avg_pool = nn.AdaptiveAvgPool2d(1)
        self.conv_reduce = nn.Conv2d(channels, squeezed, 1)
        self.bn = nn.BatchNorm2d(squeezed)
        self.act = nn.ReLU(inplace=True)
        self.conv_expand = nn.Conv2d(squeezed, channels, 1)
        self.gate = nn.Sigmoid()

    def forward(self, x):
        s = self.avg_pool(x)
        s = self.act(self.bn(self.conv_reduce(s)))
        return x * self.gate(self.conv_expand(s))


class LinearBottleneck(nn.Module):
    def __init__(self, in_ch, out_ch, stride, expand, use_se):
        super().__init__()
        dw_ch = in_ch * expand
        if expand != 1:
            self.conv_exp = ConvBnAct(in_ch, dw_ch, kernel=1)
        self.conv_dw = ConvBn(dw_ch, dw_ch, kernel=3, stride=stride, groups=dw_ch)
        if use_se:
            self.se = SqueezeExcite(dw_ch)
        self.act_dw = nn.ReLU6(inplace=True)
        self.conv_pwl = ConvBn(dw_ch, out_ch, kernel=1)
        self.use_shortcut = stride == 1 and in_ch <= out_ch
        self.in_ch = in_ch

    def forward(self, x):
        shortcut = x
        out = x
        if hasattr(self, "conv_exp"):
            out = self.conv_exp(out)
        out = self.conv_dw(out)
        if hasattr(self, "se"):
            out = self.se(out)
        out = self.act_dw(out)
        out = self.conv_pwl(out)
        if self.use_shortcut:
            out[:, : self.in_ch] = out[:, : self.in_ch] + shortcut
        return out


class ReXNet(nn.Module):
    def __init__(self, num_classes: int = 1000):
        super().__init__()
        self.stem = ConvBnAct(3, STEM_CHANNELS, kernel=3, stride=2)
        blocks = []
        in_ch = STEM_CHANNELS
        block_index = 0
        for n_layers, stage_stride, use_se in zip(STAGE_LAYERS, STAGE_STRIDES, STAGE_USE_SE):
            for i in range(n_layers):
                out_ch = CHANNELS[block_index]
                blocks.append(
                    LinearBottleneck(
                        in_ch,
                        out_ch,
                        stride=stage_stride if i == 0 else 1,
                        expand=1 if block_index == 0 else 6,
                        use_se=use_se,
                    )
                )
                in_ch = out_ch
                block_index += 1
        self.features = nn.Sequential(*blocks)
        self.conv_head = ConvBnAct(in_ch, HEAD_CHANNELS, kernel=1)
        self.global_pool = nn.AdaptiveAvgPool2d(1)
        self.flatten = nn.Flatten(1)
        self.fc = nn.Linear(HEAD_CHANNELS, num_classes)

    def forward(self, x):
        x = self.conv_head(self.features(self.stem(x)))
        return self.fc(self.flatten(self.global_pool(x)))
