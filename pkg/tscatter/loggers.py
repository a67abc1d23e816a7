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

import json
import os
import sys
import time
from typing import Any, Dict, Optional, Sequence

from chex import Numeric

import wandb


class BaseLogger:
    def write(self, logs: Dict[str, Numeric], force: bool = False) -> None:
        raise NotImplementedError

    def close(self) -> None:
        return


class NullLogger(BaseLogger):
    def write(self, logs: Dict[str, Numeric], force: bool = False) -> None:
        return


class TerminalLogger(BaseLogger):
    """Rate-limited `key: value |` lines on stderr, leaving stdout to CSV and JSON output."""

    def __init__(
        self,
        log_every: int = 2,  # seconds
    ):
        self._log_every = log_every
        self._last_log = time.time()

    def write(self, logs: Dict[str, Numeric], force: bool = False) -> None:
        if not force and time.time() - self._last_log <= self._log_every:
            return
        line = " ".join(f"{key}: {float(value):.6g} |" for key, value in logs.items())
        print(line, file=sys.stderr)
        if not force:
            self._last_log = time.time()


class WandbLogger(BaseLogger):
    def __init__(
        self,
        config: Optional[Dict[str, Any]] = None,
        project: str = "tscatter",
        notes: str = "",
        tags: Sequence[str] = ("verify",),
        entity: Optional[str] = None,
        log_every: int = 2,  # seconds
    ):
        wandb.init(
            project=project, notes=notes, tags=list(tags), entity=entity, config=config or {}
        )

        self._terminal = TerminalLogger(log_every)

    def write(self, logs: Dict[str, Numeric], force: bool = False) -> None:
        wandb.log({key: float(value) for key, value in logs.items()})
        self._terminal.write(logs, force)

    def close(self) -> None:
        wandb.finish()


class JsonWriter:
    """Merges verification reports into one json file.

    Runs are nested as config name / suite / `seed_<n>`, so repeated runs of
    different configs and suites accumulate in the same file.

    Args:
    ----
        path (str): directory of the file
        config_name (str): name of the surface configuration
        suite (str): verification suite that was run
        seed (int): seed of the random sample grids
        file_name (str): name of the json file

    """

    def __init__(
        self,
        path: str,
        config_name: str,
        suite: str,
        seed: int,
        file_name: str = "verify.json",
        save_to_wandb: bool = False,
    ):
        self.path = path
        self.file_name = file_name
        self.run_data: Dict[str, Any] = {"checks": {}, "summary": {}}
        self._save_to_wandb = save_to_wandb

        # If the file already exists, load it
        if os.path.isfile(self.file_path):
            with open(self.file_path, "r") as f:
                data = json.load(f)
        else:
            os.makedirs(self.path, exist_ok=True)
            data = {}

        self.data = data
        self.data.setdefault(config_name, {}).setdefault(suite, {})
        self.data[config_name][suite][f"seed_{seed}"] = self.run_data
        self._flush()

    @property
    def file_path(self) -> str:
        return os.path.join(self.path, self.file_name)

    def write(self, name: str, passed: bool, measured: float, threshold: float) -> None:
        """Stores one check result and rewrites the file."""
        self.run_data["checks"][name] = {
            "passed": passed,
            "measured": _jsonable(measured),
            "threshold": threshold,
        }
        self._flush()

    def write_summary(self, passed: int, failed: int) -> None:
        self.run_data["summary"] = {"passed": passed, "failed": failed}
        self._flush()

    def _flush(self) -> None:
        with open(self.file_path, "w") as f:
            json.dump(self.data, f, indent=4)

    def close(self) -> None:
        if self._save_to_wandb:
            wandb.save(self.file_path)


def _jsonable(value: float) -> Any:
    # json has no inf/nan literals
    if value != value or value in (float("inf"), float("-inf")):
        return str(value)
    return value
