"""Reader and writer for the OpenQASM 2.0 subset used by the mapper."""

from __future__ import annotations

import ast
import math
import operator
import re
from fractions import Fraction
from typing import Iterable, Iterator

from .circuit import KNOWN_GATES, Gate, LogicalCircuit
from .errors import CircuitValidationError, QasmParseError

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_RE_HEADER = re.compile(r"OPENQASM\s+\d+(\.\d+)?$")
_RE_INCLUDE = re.compile(r'include\s+"[^"]*"$')
_RE_REG = re.compile(rf"(qreg|creg)\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_RE_APPLY = re.compile(rf"({_IDENT})\s*(?:\((.*)\))?\s+(.+)$", re.S)
_RE_ARG = re.compile(rf"({_IDENT})\s*(?:\[\s*(\d+)\s*\])?$")
_IGNORED = ("measure", "barrier")

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


def eval_angle(text: str) -> float:
    """Evaluate a QASM parameter expression such as ``-3*pi/4``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
        ):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return ev(ast.parse(text.strip().replace("^", "**"), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"bad expression {text!r}") from exc


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _statements(text: str) -> Iterator[tuple[int, str]]:
    """Yield ``(line, statement)`` with comments and gate-definition bodies removed."""
    text = re.sub(r"//[^\n]*", "", text)
    line = 1
    start_line = None
    buf: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
        if start_line is None and not ch.isspace():
            start_line = line
        if ch == "{":
            # gate/opaque definition body: skip to the matching brace
            depth = 1
            i += 1
            while i < len(text) and depth:
                if text[i] == "{":
                    depth += 1
                elif text[i] == "}":
                    depth -= 1
                elif text[i] == "\n":
                    line += 1
                i += 1
            if depth:
                raise QasmParseError("unterminated '{'", start_line)
            head = "".join(buf).strip()
            if not head.startswith("gate"):
                raise QasmParseError(f"unexpected block after {head!r}", start_line)
            buf, start_line = [], None
            continue
        if ch == ";":
            stmt = "".join(buf).strip()
            if not stmt:
                raise QasmParseError("empty statement", line)
            yield start_line, stmt
            buf, start_line = [], None
        else:
            buf.append(ch)
        i += 1
    rest = "".join(buf).strip()
    if rest:
        raise QasmParseError(f"missing ';' after {rest!r}", start_line)


def parse_qasm(text: str) -> LogicalCircuit:
    """Parse OpenQASM 2.0 text into a :class:`LogicalCircuit`.

    Quantum registers are concatenated in declaration order. ``creg``,
    ``measure`` and ``barrier`` are dropped. Unknown gate names are kept as
    opaque gates; only their arity matters downstream.
    """
    regs: dict[str, tuple[int, int]] = {}
    num_qubits = 0
    gates: list[Gate] = []

    for lineno, stmt in _statements(text):
        if _RE_HEADER.match(stmt) or _RE_INCLUDE.match(stmt):
            continue
        m = _RE_REG.match(stmt)
        if m:
            if m.group(1) == "qreg":
                name = m.group(2)
                if name in regs:
                    raise QasmParseError(f"register {name!r} declared twice", lineno)
                size = int(m.group(3))
                regs[name] = (num_qubits, size)
                num_qubits += size
            continue
        word = stmt.split(None, 1)[0].split("(")[0]
        if word in _IGNORED or word == "opaque":
            continue
        if word in ("if", "reset", "OPENQASM", "include", "qreg", "creg", "gate"):
            raise QasmParseError(f"unsupported or malformed statement {stmt!r}", lineno)
        m = _RE_APPLY.match(stmt)
        if not m:
            raise QasmParseError(f"cannot parse statement {stmt!r}", lineno)
        kind, ptext, atext = m.group(1), m.group(2), m.group(3)
        try:
            params = tuple(eval_angle(p) for p in _split_top_level(ptext)) if ptext else ()
        except ValueError as exc:
            raise QasmParseError(str(exc), lineno) from None

        operands: list[list[int]] = []
        for arg in _split_top_level(atext):
            am = _RE_ARG.match(arg)
            if not am:
                raise QasmParseError(f"bad operand {arg!r}", lineno)
            reg = am.group(1)
            if reg not in regs:
                raise CircuitValidationError(f"line {lineno}: undeclared register {reg!r}")
            offset, size = regs[reg]
            if am.group(2) is None:
                operands.append([offset + k for k in range(size)])
            else:
                idx = int(am.group(2))
                if idx >= size:
                    raise CircuitValidationError(
                        f"line {lineno}: qubit {reg}[{idx}] outside register of size {size}"
                    )
                operands.append([offset + idx])

        if len(operands) > 3:
            raise CircuitValidationError(f"line {lineno}: gate {kind!r} has {len(operands)} operands; at most 3")
        expected = KNOWN_GATES.get(kind)
        if expected is not None:
            arity, nparams = expected
            if len(operands) != arity:
                raise CircuitValidationError(
                    f"line {lineno}: {kind} takes {arity} qubit(s), got {len(operands)}"
                )
            if len(params) != nparams:
                raise CircuitValidationError(
                    f"line {lineno}: {kind} takes {nparams} parameter(s), got {len(params)}"
                )

        widths = {len(o) for o in operands if len(o) > 1}
        if len(widths) > 1:
            raise CircuitValidationError(f"line {lineno}: register operands of unequal size")
        width = widths.pop() if widths else 1
        for k in range(width):
            qubits = tuple(o[k] if len(o) > 1 else o[0] for o in operands)
            try:
                gates.append(Gate(len(gates), kind, qubits, params))
            except CircuitValidationError as exc:
                raise CircuitValidationError(f"line {lineno}: {exc}") from None

    return LogicalCircuit(num_qubits, tuple(gates))


def format_angle(x: float) -> str:
    """Render an angle; rational multiples of pi come out as ``3*pi/4``."""
    frac = Fraction(x / math.pi).limit_denominator(1 << 16)
    if abs(float(frac) * math.pi - x) <= 1e-12 * max(1.0, abs(x)):
        if frac == 0:
            return "0"
        num, den = frac.numerator, frac.denominator
        sign = "-" if num < 0 else ""
        num = abs(num)
        body = "pi" if num == 1 else f"{num}*pi"
        return f"{sign}{body}" if den == 1 else f"{sign}{body}/{den}"
    return f"{x:.12g}"


def format_gate(kind: str, qubits: Iterable[int], params: Iterable[float] = (), reg: str = "q") -> str:
    args = ",".join(f"{reg}[{q}]" for q in qubits)
    params = tuple(params)
    if params:
        return f"{kind}({','.join(format_angle(p) for p in params)}) {args};"
    return f"{kind} {args};"


def qasm_header(num_qubits: int, reg: str = "q") -> list[str]:
    return ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg {reg}[{num_qubits}];"]


def emit_qasm(circuit: LogicalCircuit) -> str:
    lines = qasm_header(circuit.num_qubits)
    lines += [format_gate(g.kind, g.qubits, g.params) for g in circuit.gates]
    return "\n".join(lines) + "\n"
