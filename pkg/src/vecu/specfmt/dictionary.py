"""Type dictionary (`.dict`): one `name : type` entry per signal."""

from __future__ import annotations

from ..errors import DuplicateName, UnknownType
from ..scalars import canonical_type
from .ast import TypeDictionary
from .tokens import TokenStream


def parse_dictionary(text: str, path: str | None = None) -> TypeDictionary:
    ts = TokenStream(text, path)
    entries: dict[str, str] = {}
    while not ts.at_eof():
        name_tok = ts.expect("ident", what="signal name")
        ts.expect("punct", ":")
        type_tok = ts.expect("ident", what="type name")
        t = canonical_type(type_tok.text)
        if t is None:
            raise UnknownType(type_tok.text, type_tok.line, type_tok.col)
        if name_tok.text in entries:
            raise DuplicateName(name_tok.text, name_tok.line, name_tok.col)
        entries[name_tok.text] = t
    return TypeDictionary(entries)


def print_dictionary(d: TypeDictionary) -> str:
    return "".join(f"{name}: {t}\n" for name, t in d.entries.items())
