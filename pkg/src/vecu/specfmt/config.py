"""vECU configuration (`.vcfg`): key/value lines, all keys optional.

Keys:
    bypassable: Mod1, Mod2
    exposed_tunables: Mod1
    eliminated_runnables: Mod.Run
    crank_angle_signal: SignalName
    recorded_signals: Sig1, Sig2

Keys may repeat; list keys accumulate, crank_angle_signal takes the last.
"""

from __future__ import annotations

from ..errors import UnknownKey
from .ast import VecuConfig
from .osspec import runnable_ref
from .tokens import TokenStream

_KEYS = ("bypassable", "exposed_tunables", "eliminated_runnables",
         "crank_angle_signal", "recorded_signals")


def _ident_list(ts: TokenStream) -> list[str]:
    names = [ts.expect("ident", what="name").text]
    while ts.accept("punct", ","):
        names.append(ts.expect("ident", what="name").text)
    return names


def parse_vecu_config(text: str, path: str | None = None) -> VecuConfig:
    ts = TokenStream(text, path)
    cfg = VecuConfig()
    while not ts.at_eof():
        key_tok = ts.expect("ident", what="config key")
        if key_tok.text not in _KEYS:
            raise UnknownKey(key_tok.text, key_tok.line, key_tok.col)
        ts.expect("punct", ":")
        if key_tok.text == "crank_angle_signal":
            cfg.crank_angle_signal = ts.expect("ident", what="signal name").text
        elif key_tok.text == "eliminated_runnables":
            cfg.eliminated_runnables.add(runnable_ref(ts))
            while ts.accept("punct", ","):
                cfg.eliminated_runnables.add(runnable_ref(ts))
        elif key_tok.text == "recorded_signals":
            for n in _ident_list(ts):
                if n not in cfg.default_recorded_signals:
                    cfg.default_recorded_signals.append(n)
        elif key_tok.text == "bypassable":
            cfg.bypassable_modules.update(_ident_list(ts))
        else:
            cfg.exposed_tunable_modules.update(_ident_list(ts))
    return cfg


def print_vecu_config(cfg: VecuConfig) -> str:
    out = []
    if cfg.bypassable_modules:
        out.append("bypassable: " + ", ".join(sorted(cfg.bypassable_modules)) + "\n")
    if cfg.exposed_tunable_modules:
        out.append("exposed_tunables: "
                   + ", ".join(sorted(cfg.exposed_tunable_modules)) + "\n")
    if cfg.eliminated_runnables:
        out.append("eliminated_runnables: "
                   + ", ".join(sorted(cfg.eliminated_runnables)) + "\n")
    if cfg.crank_angle_signal:
        out.append(f"crank_angle_signal: {cfg.crank_angle_signal}\n")
    if cfg.default_recorded_signals:
        out.append("recorded_signals: "
                   + ", ".join(cfg.default_recorded_signals) + "\n")
    return "".join(out)
