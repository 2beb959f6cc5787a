#!/usr/bin/env python3
# Copyright 2026 The Lensum Authors.
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

# Stand-in for an external seq2seq runner. "train" memorizes pairs into a
# JSON checkpoint; "generate" answers from it and otherwise upper-cases the
# first word of the input.

import json
import os
import sys


def load_table(checkpoint):
    if checkpoint and os.path.isfile(checkpoint):
        with open(checkpoint) as f:
            return json.load(f)
    return {}


def train(checkpoint, pairs, output, epochs):
    table = load_table(checkpoint)
    with open(pairs) as f:
        for line in f:
            if line.strip():
                pair = json.loads(line)
                table[pair["source"]] = pair["target"]
    table["__epochs__"] = epochs
    with open(output, "w") as f:
        json.dump(table, f, sort_keys=True)


def generate(checkpoint, requests, responses):
    table = load_table(checkpoint)
    with open(requests) as f, open(responses, "w") as out:
        for line in f:
            if not line.strip():
                continue
            request = json.loads(line)
            text = table.get(request["input"])
            if text is None:
                words = request["input"].split()
                text = words[0].upper() if words else ""
            out.write(json.dumps({"output": text}) + "\n")


def main(argv):
    if argv[1] == "train":
        train(argv[2], argv[3], argv[4], argv[5])
    elif argv[1] == "generate":
        generate(argv[2], argv[3], argv[4])
    elif argv[1] == "fail":
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
