# Copyright 2026 The DRNet Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""DRNet retinal vessel segmentation."""

from ._drnet import (
    ConfigError,
    ConfusionCounts,
    DomainError,
    Error,
    FormatError,
    IngestionError,
    Model,
    NumericError,
    ShapeError,
    UndefinedMetricError,
    accuracy,
    auc,
    binarize,
    confusion_counts,
    dropblock_gamma,
    mcc,
    pad_to,
    selftest,
    sensitivity,
    specificity,
    synthetic_sample,
)

__all__ = [
    "ConfigError",
    "ConfusionCounts",
    "DomainError",
    "Error",
    "FormatError",
    "IngestionError",
    "Model",
    "NumericError",
    "ShapeError",
    "UndefinedMetricError",
    "accuracy",
    "auc",
    "binarize",
    "confusion_counts",
    "dropblock_gamma",
    "mcc",
    "pad_to",
    "selftest",
    "sensitivity",
    "specificity",
    "synthetic_sample",
]
