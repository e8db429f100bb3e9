#!/usr/bin/env python3
"""Convert tracking.js JSON cascade assets to the legacy XML dialect.

The tracking.js project (BSD-licensed) ships the classical pre-trained
frontal-face and eye Haar cascades as JSON embedded in JS files; this
tool re-serializes them into the legacy ``opencv-haar-classifier`` XML
dialect that this package parses. All numeric literals are carried over
verbatim (as strings), so the output is a faithful re-encoding of the
published model data, not a re-parse.

Usage: convert_cascade_json.py <input.js> <output.xml> [<name>]
"""

from __future__ import annotations

import json
import sys
from xml.sax.saxutils import escape


def load_js_object(path: str) -> dict:
    text = open(path, "r", encoding="utf-8").read()
    return json.loads(text[text.index("{"): text.rindex("}") + 1])


def convert(obj: dict, name: str) -> str:
    type_id = obj.get("type_id") or obj.get("@type_id")
    if type_id != "opencv-haar-classifier":
        raise SystemExit(f"unexpected type_id {type_id!r}")
    out = ['<?xml version="1.0"?>', "<opencv_storage>",
           f'<{name} type_id="opencv-haar-classifier">',
           f"  <size>{escape(obj['size'].strip())}</size>",
           "  <stages>"]
    for stage in obj["stages"]:
        out.append("    <_>")
        out.append("      <trees>")
        for tree in stage["trees"]:
            if len(tree) != 1:
                raise SystemExit("tree with multiple nodes; stump-only subset expected")
            node = tree[0]
            feat = node["feature"]
            out.append("        <_>")
            out.append("          <_>")
            out.append("            <feature>")
            out.append("              <rects>")
            for rect in feat["rects"]:
                out.append(f"                <_>{escape(rect.strip())}</_>")
            out.append("              </rects>")
            out.append(f"              <tilted>{escape(str(feat['tilted']).strip())}</tilted>")
            out.append("            </feature>")
            out.append(f"            <threshold>{escape(node['threshold'].strip())}</threshold>")
            out.append(f"            <left_val>{escape(node['left_val'].strip())}</left_val>")
            out.append(f"            <right_val>{escape(node['right_val'].strip())}</right_val>")
            out.append("          </_>")
            out.append("        </_>")
        out.append("      </trees>")
        out.append(f"      <stage_threshold>{escape(stage['stage_threshold'].strip())}"
                   "</stage_threshold>")
        out.append("    </_>")
    out += ["  </stages>", f"</{name}>", "</opencv_storage>", ""]
    return "\n".join(out)


def main() -> None:
    if len(sys.argv) not in (3, 4):
        raise SystemExit(__doc__)
    src, dst = sys.argv[1], sys.argv[2]
    name = sys.argv[3] if len(sys.argv) == 4 else "cascade"
    xml = convert(load_js_object(src), name)
    with open(dst, "w", encoding="utf-8") as fh:
        fh.write(xml)
    print(f"wrote {dst}")


if __name__ == "__main__":
    main()
