"""OpenQASM 2.0 subset parser and emitter.

Accepted: the OPENQASM header, include lines, one qreg, at most one creg,
the 17 feature gates (``cu1`` is read as ``cp``), ``measure`` and ``barrier``.
Everything else is rejected with the offending line number.
"""
import ast
import math
import operator
import re
from dataclasses import dataclass
from pathlib import Path

from app.errors import CircuitError, QasmSyntaxError, RegisterError, UnsupportedGateError
from app.models.circuit import Gate, QuantumCircuit
from app.models.enums import GateKind

GATE_NAMES: dict[str, GateKind] = {
    "h": GateKind.H,
    "cx": GateKind.CNOT,
    "x": GateKind.X,
    "y": GateKind.Y,
    "z": GateKind.Z,
    "rx": GateKind.RX,
    "ry": GateKind.RY,
    "rz": GateKind.RZ,
    "cz": GateKind.CZ,
    "cp": GateKind.CP,
    "cu1": GateKind.CP,
    "t": GateKind.T,
    "ccx": GateKind.TOFFOLI,
    "swap": GateKind.SWAP,
    "tdg": GateKind.TDG,
    "s": GateKind.S,
    "sdg": GateKind.SDG,
    "u3": GateKind.U3,
}

_HEADER = re.compile(r"^OPENQASM\s+2(\.0)?$")
_INCLUDE = re.compile(r'^include\s+"[^"]+"$')
_REG = re.compile(r"^(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_MEASURE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")
_GATE = re.compile(r"^([A-Za-z_]\w*)\s*(?:\((.*)\))?\s+(.+)$")
_ARG = re.compile(r"^([A-Za-z_]\w*)\s*(?:\[\s*(\d+)\s*\])?$")

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan, "sqrt": math.sqrt,
          "exp": math.exp, "ln": math.log}


@dataclass
class _Statement:
    text: str
    line: int


class QasmParser:
    """Parser for the supported OpenQASM 2.0 subset."""

    def __init__(self, text: str):
        self.text = text
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None
        self.gates: list[Gate] = []

    def parse(self, name: str | None = None) -> QuantumCircuit:
        for stmt in self._statements():
            self._parse_statement(stmt)
        if self.qreg is None:
            raise RegisterError("program declares no qreg")
        return QuantumCircuit(self.qreg[1], tuple(self.gates), name)

    # ---- lexing ----

    def _statements(self) -> list[_Statement]:
        """Split on ';', remembering the line each statement starts on."""
        statements: list[_Statement] = []
        buf: list[str] = []
        start = None
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.split("//", 1)[0]
            while line:
                head, sep, line = line.partition(";")
                if head.strip() and start is None:
                    start = lineno
                buf.append(head)
                if sep:
                    text = " ".join(part.strip() for part in buf).strip()
                    if text:
                        statements.append(_Statement(text, start or lineno))
                    buf, start = [], None
        leftover = " ".join(part.strip() for part in buf).strip()
        if leftover:
            raise QasmSyntaxError(f"missing ';' after '{leftover}'", start or 1)
        return statements

    # ---- statements ----

    def _parse_statement(self, stmt: _Statement) -> None:
        text, line = stmt.text, stmt.line
        if _HEADER.match(text) or _INCLUDE.match(text):
            return
        if text.startswith("if") and re.match(r"^if\s*\(", text):
            raise RegisterError(f"line {line}: classically conditioned gates are not supported")
        if text.startswith(("gate ", "opaque ")):
            raise UnsupportedGateError(text.split()[1].split("(")[0], line)

        reg = _REG.match(text)
        if reg:
            self._declare(reg.group(1), reg.group(2), int(reg.group(3)), line)
            return

        meas = _MEASURE.match(text)
        if meas:
            self._measure(meas.group(1), meas.group(2), line)
            return

        gate = _GATE.match(text)
        if not gate:
            raise QasmSyntaxError(f"cannot parse '{text}'", line)
        name, params_text, args_text = gate.group(1), gate.group(2), gate.group(3)

        if name == "barrier":
            qubits = [q for arg in self._split_args(args_text, line) for q in self._qubits(arg, line)]
            self.gates.append(Gate(GateKind.BARRIER, tuple(qubits)))
            return

        kind = GATE_NAMES.get(name)
        if kind is None:
            raise UnsupportedGateError(name, line)
        params = self._params(params_text, line)
        if len(params) != kind.n_params:
            raise QasmSyntaxError(
                f"'{name}' takes {kind.n_params} parameter(s), got {len(params)}", line
            )
        args = [self._qubits(arg, line) for arg in self._split_args(args_text, line)]
        if len(args) != kind.arity:
            raise QasmSyntaxError(f"'{name}' takes {kind.arity} argument(s), got {len(args)}", line)
        for qubits in self._broadcast(args, line):
            try:
                self.gates.append(Gate(kind, qubits, params))
            except ValueError as exc:
                raise QasmSyntaxError(str(exc), line) from exc

    def _declare(self, reg_type: str, name: str, size: int, line: int) -> None:
        if size < 1:
            raise QasmSyntaxError(f"{reg_type} '{name}' must have positive size", line)
        if reg_type == "qreg":
            if self.qreg is not None:
                raise RegisterError(f"line {line}: only one qreg is supported")
            self.qreg = (name, size)
        else:
            if self.creg is not None:
                raise RegisterError(f"line {line}: only one creg is supported")
            self.creg = (name, size)

    def _measure(self, source: str, target: str, line: int) -> None:
        qubits = self._qubits(source, line)
        match = _ARG.match(target.strip())
        if not match or self.creg is None or match.group(1) != self.creg[0]:
            raise RegisterError(f"line {line}: measurement target '{target}' is not the declared creg")
        for q in qubits:
            self.gates.append(Gate(GateKind.MEASURE, (q,)))

    # ---- operands ----

    @staticmethod
    def _split_args(args_text: str, line: int) -> list[str]:
        args = [a.strip() for a in args_text.split(",")]
        if any(not a for a in args):
            raise QasmSyntaxError(f"empty argument in '{args_text}'", line)
        return args

    def _qubits(self, arg: str, line: int) -> list[int]:
        match = _ARG.match(arg.strip())
        if not match:
            raise QasmSyntaxError(f"bad qubit argument '{arg}'", line)
        if self.qreg is None:
            raise RegisterError(f"line {line}: gate used before any qreg declaration")
        name, index = match.group(1), match.group(2)
        if name != self.qreg[0]:
            raise RegisterError(f"line {line}: unknown register '{name}'")
        if index is None:
            return list(range(self.qreg[1]))
        q = int(index)
        if q >= self.qreg[1]:
            raise QasmSyntaxError(f"index {q} out of range for {name}[{self.qreg[1]}]", line)
        return [q]

    @staticmethod
    def _broadcast(args: list[list[int]], line: int) -> list[tuple[int, ...]]:
        """Expand whole-register operands the way OpenQASM 2 broadcasts them."""
        sizes = {len(a) for a in args if len(a) > 1}
        if len(sizes) > 1:
            raise QasmSyntaxError("register operands of different sizes", line)
        width = sizes.pop() if sizes else 1
        return [tuple(a[i] if len(a) > 1 else a[0] for a in args) for i in range(width)]

    def _params(self, params_text: str | None, line: int) -> list[float]:
        if params_text is None or not params_text.strip():
            return []
        return [self._eval(p.strip(), line) for p in params_text.split(",")]

    def _eval(self, expr: str, line: int) -> float:
        try:
            tree = ast.parse(expr, mode="eval")
            return float(self._eval_node(tree.body))
        except (SyntaxError, ValueError, ZeroDivisionError, TypeError) as exc:
            raise QasmSyntaxError(f"bad parameter expression '{expr}'", line) from exc

    def _eval_node(self, node: ast.AST) -> float:
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = self._eval_node(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](self._eval_node(node.left), self._eval_node(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
        ):
            return _FUNCS[node.func.id](self._eval_node(node.args[0]))
        raise ValueError("unsupported expression")


def parse_qasm(text: str, name: str | None = None) -> QuantumCircuit:
    """Parse OpenQASM 2.0 subset text into a circuit."""
    return QasmParser(text).parse(name)


def emit_qasm(circuit: QuantumCircuit) -> str:
    """Render a circuit as OpenQASM 2.0; ``parse_qasm`` reads it back gate-identical."""
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.n_qubits}];",
        f"creg c[{circuit.n_qubits}];",
    ]
    for gate in circuit.gates:
        operands = ",".join(f"q[{q}]" for q in gate.qubits)
        if gate.kind is GateKind.MEASURE:
            lines.append(f"measure q[{gate.qubits[0]}] -> c[{gate.qubits[0]}];")
        elif gate.kind is GateKind.BARRIER:
            lines.append(f"barrier {operands};")
        elif gate.params:
            params = ",".join(repr(p) for p in gate.params)
            lines.append(f"{gate.kind.value}({params}) {operands};")
        else:
            lines.append(f"{gate.kind.value} {operands};")
    return "\n".join(lines) + "\n"


def load_qasm(path: str | Path) -> QuantumCircuit:
    """Parse a QASM file; the circuit is named after the file stem."""
    path = Path(path)
    if not path.is_file():
        raise CircuitError(f"circuit file not found: {path}")
    return parse_qasm(path.read_text(encoding="utf-8"), name=path.stem)
