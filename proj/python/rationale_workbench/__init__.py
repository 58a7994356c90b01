# Copyright 2026 The Rationale Workbench Authors.
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

"""Python bindings for the rationale workbench core."""

import json as _json

from ._rwb import *  # noqa: F401,F403
from ._rwb import parse_judge_output as _parse_judge_output
from ._rwb import run_pipeline as _run_pipeline


def parse_judge_output(text):
    """Parses judge output into a dict with "score", "errors" and "judge"."""
    return _json.loads(_parse_judge_output(text))


def run_pipeline(config_path):
    """Generates, scores and aggregates a run; returns the report dict."""
    return _json.loads(_run_pipeline(str(config_path)))
