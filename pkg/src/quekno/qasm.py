"""
OpenQASM 2.0 emitter and parser for the gate subset used by benchmarks.

Accepted statements: the ``OPENQASM 2.0`` header, ``include``, a single
``qreg``, ``cx``, ``swap``, parameterless 1-qubit gates and ``barrier``
(ignored). Anything else is rejected with the offending line and token.
"""
import re
from pathlib import Path
from typing import List, Optional, Union

from .circuit import Circuit, Gate, GateKind
from .storage import atomic_write_text

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

_QREG = re.compile(r'^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$')
_ARG = re.compile(r'^([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$')
_GATE = re.compile(r'^([A-Za-z_]\w*)\s+(.+)$')


class QasmParseError(ValueError):
    """Raised on QASM text outside the supported subset."""

    def __init__(self, message: str, line: int, token: str):
        super().__init__(f"line {line}: {message} (near '{token}')")
        self.line = line
        self.token = token


def emit_qasm(c: Circuit, register: str = 'q') -> str:
    """
    Render a circuit as OpenQASM 2.0 text.

    Args:
        c: Circuit to emit
        register: Name of the single quantum register

    Returns:
        QASM source ending with a newline
    """
    lines = [HEADER + f"qreg {register}[{c.n_qubits}];"]
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            lines.append(f"cx {register}[{g.qubits[0]}],{register}[{g.qubits[1]}];")
        elif g.kind is GateKind.SWAP:
            lines.append(f"swap {register}[{g.qubits[0]}],{register}[{g.qubits[1]}];")
        else:
            lines.append(f"{g.tag} {register}[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


def parse_qasm(text: str) -> Circuit:
    """
    Parse QASM text in the supported subset.

    Args:
        text: QASM source

    Returns:
        Circuit with one gate per cx/swap/1-qubit statement
    """
    register: Optional[str] = None
    size = 0
    gates: List[Gate] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('//', 1)[0].strip()
        if not line:
            continue
        if not line.endswith(';'):
            raise QasmParseError("missing ';'", lineno, line)
        for stmt in (s.strip() for s in line[:-1].split(';')):
            if not stmt:
                continue
            head = stmt.split()[0]

            if head == 'OPENQASM':
                if stmt.split()[1:] != ['2.0']:
                    raise QasmParseError("only OPENQASM 2.0 is supported", lineno, stmt)
                continue
            if head == 'include':
                continue
            if head == 'barrier':
                continue
            if head == 'qreg':
                m = _QREG.match(stmt)
                if not m:
                    raise QasmParseError("malformed qreg", lineno, stmt)
                if register is not None:
                    raise QasmParseError("only one qreg is supported", lineno, m.group(1))
                register, size = m.group(1), int(m.group(2))
                continue
            if head in ('creg', 'measure', 'reset', 'gate', 'if', 'opaque'):
                raise QasmParseError("unsupported statement", lineno, head)

            m = _GATE.match(stmt)
            if not m:
                raise QasmParseError("malformed gate", lineno, stmt)
            name = m.group(1)
            if register is None:
                raise QasmParseError("gate before qreg", lineno, name)

            qubits = []
            for arg in m.group(2).split(','):
                am = _ARG.match(arg.strip())
                if not am or am.group(1) != register:
                    raise QasmParseError("bad qubit argument", lineno, arg.strip())
                q = int(am.group(2))
                if q >= size:
                    raise QasmParseError(f"qubit index outside {register}[{size}]", lineno, arg.strip())
                qubits.append(q)

            try:
                if name in ('cx', 'CX'):
                    gate = Gate.cnot(*qubits) if len(qubits) == 2 else None
                elif name == 'swap':
                    gate = Gate.swap(*qubits) if len(qubits) == 2 else None
                else:
                    gate = Gate.one(qubits[0], name) if len(qubits) == 1 else None
            except ValueError as exc:
                raise QasmParseError(str(exc), lineno, name) from None
            if gate is None:
                raise QasmParseError(f"wrong number of qubits for '{name}'", lineno, name)
            gates.append(gate)

    if register is None:
        raise QasmParseError("no qreg declared", 0, '')
    return Circuit(tuple(gates), size)


def load_qasm(path: Union[str, Path]) -> Circuit:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"QASM file not found: {path}")
    return parse_qasm(path.read_text())


def write_qasm(path: Union[str, Path], c: Circuit) -> Path:
    return atomic_write_text(path, emit_qasm(c))
