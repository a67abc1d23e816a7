# Copyright 2024 The tscatter Authors. All rights reserved.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import seaborn as sns  # noqa: E402
from absl import logging  # noqa: E402


def _tick_labels(values: np.ndarray, count: int = 6) -> list:
    step = max(1, len(values) // count)
    return [f"{v:.3g}" if i % step == 0 else "" for i, v in enumerate(values)]


def plot_grid(
    re_values: np.ndarray,
    im_values: np.ndarray,
    values: np.ndarray,
    path: str,
    title: str = "",
) -> None:
    """Saves log10 |value| and arg(value) over the grid as two heatmaps.

    `values` has one row per imaginary part and one column per real part;
    NaN cells (excluded nodes) are left blank.

    Args:
    ----
        re_values (np.ndarray): real parts, the columns of the grid
        im_values (np.ndarray): imaginary parts, the rows of the grid
        values (np.ndarray): complex values of shape (len(im_values), len(re_values))
        path (str): image file to write
        title (str): figure title

    """
    values = np.asarray(values, dtype=complex)
    # heatmaps draw the first row at the top
    flipped = values[::-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        modulus = np.log10(np.abs(flipped))
    phase = np.angle(flipped)
    phase[np.isnan(flipped)] = np.nan

    sns.set_theme(style="whitegrid")
    fig, axes = plt.subplots(1, 2, figsize=(12, 5))
    xticks = _tick_labels(np.asarray(re_values))
    yticks = _tick_labels(np.asarray(im_values)[::-1])

    sns.heatmap(modulus, ax=axes[0], cmap="viridis", xticklabels=xticks, yticklabels=yticks)
    axes[0].set_title("log10 |value|")
    sns.heatmap(
        phase,
        ax=axes[1],
        cmap="twilight",
        vmin=-np.pi,
        vmax=np.pi,
        xticklabels=xticks,
        yticklabels=yticks,
    )
    axes[1].set_title("arg value")
    for ax in axes:
        ax.set_xlabel("Re s")
        ax.set_ylabel("Im s")

    fig.suptitle(title)
    fig.tight_layout()

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    logging.info("saved grid figure to %s", path)
