#!/usr/bin/env python3
"""
Build the help search index.

@help.category Development Tools
@help.title Build Help Script
@help.description Collects the @help topics under src/ into docs/help/search_index.json.
"""
import json
import sys
from dataclasses import asdict
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from help_parser import HelpParser


def main(source_dir: str = "src", output: str = "docs/help/search_index.json") -> int:
    print("Parsing help tags from source code...")
    topics = HelpParser(source_dir=source_dir).parse_all()
    if not topics:
        print("WARNING: No help topics found. Make sure help tags are present in source files.")
        return 1
    categories = sorted({topic.category or "General" for topic in topics})
    target = Path(output)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(
        json.dumps({"categories": categories, "topics": [asdict(t) for t in topics]}, indent=2),
        encoding="utf-8",
    )
    print(f"Wrote {len(topics)} topics in {len(categories)} categories to {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
