"""
Help tag parser for the source tree.

@help.category Development Tools
@help.title Help Parser
@help.description Reads @help tags from module, class and function docstrings, and the
"# @help.description" comments that follow model fields. A tag's text runs until the next tag
or a blank line.
"""
import ast
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

TAG = re.compile(r"^\s*@help\.(\w+)\s*(.*)$")
FIELD_COMMENT = re.compile(r"^\s*#\s*@help\.description\s+(.+)$")


@dataclass
class HelpTopic:
    file_path: str
    context: str
    line_number: int
    category: str = ""
    title: str = ""
    description: str = ""
    examples: List[str] = field(default_factory=list)
    performance: str = ""
    use_case: str = ""
    fields: List[Dict[str, str]] = field(default_factory=list)


def parse_tags(docstring: str) -> Dict[str, List[str]]:
    """Tag name -> list of texts; examples keep their line breaks."""
    tags: Dict[str, List[str]] = {}
    current: Optional[str] = None
    buffer: List[str] = []

    def flush():
        if current is not None:
            joiner = "\n" if current == "example" else " "
            text = joiner.join(line.strip() if joiner == " " else line.rstrip() for line in buffer).strip()
            tags.setdefault(current, []).append(text)

    for line in docstring.splitlines():
        match = TAG.match(line)
        if match:
            flush()
            current, buffer = match.group(1), [match.group(2)]
        elif current is not None and line.strip():
            buffer.append(line)
        elif current is not None and current != "example":
            flush()
            current, buffer = None, []
    flush()
    return tags


class HelpParser:
    def __init__(self, source_dir: str = "src"):
        self.source_dir = Path(source_dir)

    def parse_file(self, path: Path) -> List[HelpTopic]:
        source = path.read_text(encoding="utf-8")
        tree = ast.parse(source)
        lines = source.splitlines()
        module_category = ""
        topics = []
        nodes = [tree] + [n for n in ast.walk(tree) if isinstance(n, (ast.ClassDef, ast.FunctionDef))]
        for node in nodes:
            docstring = ast.get_docstring(node)
            if not docstring or "@help." not in docstring:
                continue
            tags = parse_tags(docstring)
            if isinstance(node, ast.Module):
                module_category = tags.get("category", [""])[0]
                context, line_number = "module", 1
            else:
                context, line_number = node.name, node.lineno
            topic = HelpTopic(
                file_path=str(path),
                context=context,
                line_number=line_number,
                category=tags.get("category", [module_category])[0],
                title=tags.get("title", [""])[0],
                description=" ".join(tags.get("description", [])),
                examples=tags.get("example", []),
                performance=" ".join(tags.get("performance", [])),
                use_case=" ".join(tags.get("use_case", [])),
            )
            if isinstance(node, ast.ClassDef):
                topic.fields = self._field_comments(node, lines)
            if topic.title:
                topics.append(topic)
        return topics

    @staticmethod
    def _field_comments(node: ast.ClassDef, lines: List[str]) -> List[Dict[str, str]]:
        fields = []
        for statement in node.body:
            if isinstance(statement, ast.AnnAssign) and isinstance(statement.target, ast.Name):
                after = statement.end_lineno  # 1-based line of the statement end = index of the next line
                if after < len(lines):
                    match = FIELD_COMMENT.match(lines[after])
                    if match:
                        fields.append({"name": statement.target.id, "description": match.group(1).strip()})
        return fields

    def parse_all(self) -> List[HelpTopic]:
        topics = []
        for path in sorted(self.source_dir.rglob("*.py")):
            topics.extend(self.parse_file(path))
        return topics
