"""Circuit front-end parsers."""
from app.parsing.qasm import GATE_NAMES, QasmParser, emit_qasm, load_qasm, parse_qasm

__all__ = ["GATE_NAMES", "QasmParser", "emit_qasm", "load_qasm", "parse_qasm"]
