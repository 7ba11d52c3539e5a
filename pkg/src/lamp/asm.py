"""Two-pass assembler, disassembler, and program binary codec.

Assembly grammar (mnemonics case-insensitive, labels case-sensitive,
";" starts a comment):

    program   := (directive | labeled_line | blank)*
    directive := ".width" INT | ".cell" INT "," INT
    labeled_line := [IDENT ":"] instr [";" comment]
    instr := "LOGIC" BINOP SRC "," SRC "," UNOP "," MREG
           | "ORF" SRC | "JMP" IDENT | "JF" IDENT | "JNF" IDENT
           | "SETROW" INT | "INCROW" | "JRLT" IDENT
           | "SEND" DIR "," MREG | "RECV" DIR "," MREG
           | "LOADM" MREG "," BITS | "HALT"
    BINOP := AND|OR|XOR|PASS    UNOP := NOT|SLC|NOPU
    MREG  := MA|MB|MC|MD        SRC  := MREG|ROW
    DIR   := N|NE|E|SE|S|SW|W|NW

``.cell r,c`` routes the following instructions to one grid cell; a
source with no ``.cell`` at all is broadcast to every cell. ``.width``
fixes the vector width and must precede any LOADM literal.

Binary format (all integers big-endian): magic ``LAMP1``, u16 width
(0 = unspecified), sixteen u32 per-cell instruction counts in row-major
order, then each cell's instructions as 8-byte records
``kind f1 f2 f3 f4 f5 arg16``; a LOADM record is followed by its
literal packed MSB-first into ceil(width/8) bytes with zero padding.
"""

from __future__ import annotations

import re

from .bitvec import BitVector
from .errors import (
    AsmSyntaxError,
    DuplicateLabel,
    MalformedBinary,
    UnknownMnemonic,
    UnresolvedLabel,
    WidthMismatch,
)
from .sim import (
    GRID_SIZE,
    BinOp,
    Dir,
    Halt,
    IncRow,
    Instruction,
    Jump,
    JumpIfFlag,
    JumpIfNotFlag,
    JumpIfRowLt,
    LoadImm,
    Logic,
    M_REGS,
    Orf,
    Program,
    Recv,
    Reg,
    Send,
    SetRow,
    UnOp,
)

_TOKEN_RE = re.compile(r"\.?\w+|[:,]")
_IDENT_RE = re.compile(r"[A-Za-z_]\w*\Z")

MNEMONICS = {
    "LOGIC", "ORF", "JMP", "JF", "JNF", "SETROW", "INCROW", "JRLT",
    "SEND", "RECV", "LOADM", "HALT",
}


def _tokenize(line: str) -> list[tuple[str, int]]:
    """Split a comment-stripped line into (token, 1-based column) pairs."""
    return [(m.group(), m.start() + 1) for m in _TOKEN_RE.finditer(line)]


class _Cursor:
    """Token stream with position-carrying error helpers."""

    def __init__(self, tokens, lineno):
        self.tokens = tokens
        self.lineno = lineno
        self.i = 0

    def error(self, message, column=None):
        if column is None:
            column = self.tokens[self.i - 1][1] if self.tokens else 1
        raise AsmSyntaxError(message, self.lineno, column)

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def next(self, what):
        if self.i >= len(self.tokens):
            col = self.tokens[-1][1] + len(self.tokens[-1][0]) if self.tokens else 1
            raise AsmSyntaxError(f"expected {what}", self.lineno, col)
        tok, col = self.tokens[self.i]
        self.i += 1
        return tok, col

    def comma(self):
        tok, col = self.next("','")
        if tok != ",":
            raise AsmSyntaxError(f"expected ',' before {tok!r}", self.lineno, col)

    def end(self):
        if self.i < len(self.tokens):
            tok, col = self.tokens[self.i]
            raise AsmSyntaxError(f"unexpected {tok!r}", self.lineno, col)

    def enum_member(self, enum_cls, allowed, what):
        tok, col = self.next(what)
        name = tok.upper()
        members = {m.name: m for m in allowed}
        if name not in members:
            raise AsmSyntaxError(
                f"expected {what}, got {tok!r}", self.lineno, col
            )
        return members[name]

    def integer(self, what="integer"):
        tok, col = self.next(what)
        if not tok.isdigit():
            raise AsmSyntaxError(f"expected {what}, got {tok!r}", self.lineno, col)
        return int(tok)

    def ident(self, what="label"):
        tok, col = self.next(what)
        if not _IDENT_RE.match(tok):
            raise AsmSyntaxError(f"expected {what}, got {tok!r}", self.lineno, col)
        return tok, col

    def bits(self):
        tok, col = self.next("bit literal")
        if not re.fullmatch(r"[01_]+", tok) or not tok.strip("_"):
            raise AsmSyntaxError(
                f"expected bit literal, got {tok!r}", self.lineno, col
            )
        return BitVector.parse(tok), col


_SRCS = tuple(Reg)
_LABEL_REF = object()  # marks an unresolved target inside a parsed instruction


def _parse_instr(cur: _Cursor, width):
    """Parse one instruction; jump targets come back as label references."""
    tok, col = cur.next("mnemonic")
    mnem = tok.upper()
    if mnem not in MNEMONICS:
        raise UnknownMnemonic(f"unknown mnemonic {tok!r}", cur.lineno, col)
    if mnem == "LOGIC":
        binop = cur.enum_member(BinOp, tuple(BinOp), "binary op")
        src_a = cur.enum_member(Reg, _SRCS, "source operand")
        cur.comma()
        src_b = cur.enum_member(Reg, _SRCS, "source operand")
        cur.comma()
        unop = cur.enum_member(UnOp, tuple(UnOp), "unary op")
        cur.comma()
        dst = cur.enum_member(Reg, M_REGS, "m-register")
        cur.end()
        return Logic(binop, src_a, src_b, unop, dst)
    if mnem == "ORF":
        src = cur.enum_member(Reg, _SRCS, "source operand")
        cur.end()
        return Orf(src)
    if mnem in ("JMP", "JF", "JNF", "JRLT"):
        label, col = cur.ident()
        cur.end()
        kind = {"JMP": Jump, "JF": JumpIfFlag, "JNF": JumpIfNotFlag,
                "JRLT": JumpIfRowLt}[mnem]
        return (_LABEL_REF, kind, label, col)
    if mnem == "SETROW":
        idx = cur.integer("row index")
        cur.end()
        return SetRow(idx)
    if mnem == "INCROW":
        cur.end()
        return IncRow()
    if mnem in ("SEND", "RECV"):
        direction = cur.enum_member(Dir, tuple(Dir), "direction")
        cur.comma()
        reg = cur.enum_member(Reg, M_REGS, "m-register")
        cur.end()
        return (Send if mnem == "SEND" else Recv)(direction, reg)
    if mnem == "LOADM":
        reg = cur.enum_member(Reg, M_REGS, "m-register")
        cur.comma()
        literal, col = cur.bits()
        cur.end()
        if width is None:
            raise AsmSyntaxError(
                "LOADM requires a .width directive", cur.lineno, col
            )
        if literal.n != width:
            raise WidthMismatch(
                f"line {cur.lineno}: literal width {literal.n} != .width {width}"
            )
        return LoadImm(reg, literal)
    cur.end()
    return Halt()


def assemble(source: str) -> Program:
    """Assemble source text into a program (two passes)."""
    lines = source.splitlines()
    parsed = []  # (lineno, tokens) with directives resolved in pass one
    has_cell = any(
        line.split(";", 1)[0].strip().lower().startswith(".cell") for line in lines
    )

    width = None
    stream = None if has_cell else "broadcast"
    streams: dict = {}  # stream key -> list of pending instructions
    labels: dict = {}  # label -> (stream key, address)
    pending = []  # (stream, lineno, cursor-tokens) in program order

    for lineno, raw in enumerate(lines, start=1):
        text = raw.split(";", 1)[0]
        tokens = _tokenize(text)
        if not tokens:
            continue
        cur = _Cursor(tokens, lineno)
        first = cur.peek()
        if first.startswith("."):
            name, col = cur.next("directive")
            if name.lower() == ".width":
                if width is not None:
                    raise AsmSyntaxError("duplicate .width", lineno, col)
                width = cur.integer("width")
                if width < 1:
                    raise AsmSyntaxError("width must be positive", lineno, col)
                cur.end()
            elif name.lower() == ".cell":
                r = cur.integer("cell row")
                cur.comma()
                c = cur.integer("cell column")
                cur.end()
                if not (0 <= r < GRID_SIZE and 0 <= c < GRID_SIZE):
                    raise AsmSyntaxError(
                        f"cell ({r},{c}) outside the {GRID_SIZE}x{GRID_SIZE} grid",
                        lineno, col,
                    )
                stream = (r, c)
                streams.setdefault(stream, [])
            else:
                raise AsmSyntaxError(f"unknown directive {name!r}", lineno, col)
            continue

        # optional label
        label = None
        if (
            len(tokens) >= 2
            and tokens[1][0] == ":"
            and _IDENT_RE.match(first)
            and first.upper() not in MNEMONICS
        ):
            label, label_col = cur.ident()
            cur.next("':'")
            if cur.peek() is None:
                cur.error("expected instruction after label", label_col)

        if stream is None:
            raise AsmSyntaxError(
                "instruction before any .cell directive", lineno, tokens[0][1]
            )
        addr = len(streams.setdefault(stream, []))
        if label is not None:
            if label in labels:
                raise DuplicateLabel(f"duplicate label {label!r}", lineno, label_col)
            labels[label] = (stream, addr)
        streams[stream].append(None)  # reserve the address
        pending.append((stream, addr, cur))

    for stream, addr, cur in pending:
        inst = _parse_instr(cur, width)
        if isinstance(inst, tuple) and inst[0] is _LABEL_REF:
            _, kind, label, col = inst
            if label not in labels or labels[label][0] != stream:
                raise UnresolvedLabel(
                    f"label {label!r} not defined in this cell", cur.lineno, col
                )
            inst = kind(labels[label][1])
        streams[stream][addr] = inst

    program = Program(width=width)
    if "broadcast" in streams:
        if streams["broadcast"]:
            program = Program.broadcast(streams["broadcast"], width=width)
    for key, instrs in streams.items():
        if key == "broadcast":
            continue
        program.cells[key[0]][key[1]] = list(instrs)
    return program


def disassemble(program: Program) -> str:
    """Render a program as canonical source; reassembling it is identity."""
    out = []
    if program.width is not None:
        out.append(f".width {program.width}")
    for r in range(GRID_SIZE):
        for c in range(GRID_SIZE):
            code = program.cells[r][c]
            if not code:
                continue
            targets = set()
            for inst in code:
                if isinstance(inst, (Jump, JumpIfFlag, JumpIfNotFlag, JumpIfRowLt)):
                    if not 0 <= inst.target < len(code):
                        raise MalformedBinary(
                            f"cell ({r},{c}): jump target {inst.target} "
                            f"outside program of {len(code)}"
                        )
                    targets.add(inst.target)
                if isinstance(inst, LoadImm):
                    if program.width is None:
                        raise MalformedBinary("LOADM literal without a width")
                    if inst.literal.n != program.width:
                        raise MalformedBinary(
                            f"literal width {inst.literal.n} != width {program.width}"
                        )
            label = {t: f"L{r}{c}_{t}" for t in sorted(targets)}
            out.append(f".cell {r},{c}")
            for addr, inst in enumerate(code):
                head = f"{label[addr]}: " if addr in label else "    "
                if isinstance(inst, Jump):
                    body = f"JMP {label[inst.target]}"
                elif isinstance(inst, JumpIfFlag):
                    body = f"JF {label[inst.target]}"
                elif isinstance(inst, JumpIfNotFlag):
                    body = f"JNF {label[inst.target]}"
                elif isinstance(inst, JumpIfRowLt):
                    body = f"JRLT {label[inst.target]}"
                else:
                    body = inst.text()
                out.append(head + body)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# Binary codec

MAGIC = b"LAMP1"

_KIND_CODE = {
    Logic: 0, Orf: 1, Jump: 2, JumpIfFlag: 3, JumpIfNotFlag: 4,
    SetRow: 5, IncRow: 6, JumpIfRowLt: 7, LoadImm: 8, Send: 9,
    Recv: 10, Halt: 11,
}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


def _encode_instr(inst: Instruction, width) -> bytes:
    kind = _KIND_CODE[type(inst)]
    f = [0, 0, 0, 0, 0]
    arg = 0
    tail = b""
    match inst:
        case Logic(binop=b, src_a=sa, src_b=sb, unop=u, dst=d):
            f = [b.value, sa.value, sb.value, u.value, d.value]
        case Orf(src=s):
            f[0] = s.value
        case Jump(target=t) | JumpIfFlag(target=t) | JumpIfNotFlag(target=t) \
                | JumpIfRowLt(target=t):
            arg = t
        case SetRow(index=i):
            arg = i
        case LoadImm(reg=r, literal=lit):
            if width is None:
                raise MalformedBinary("cannot encode LOADM without a width")
            if lit.n != width:
                raise MalformedBinary(
                    f"literal width {lit.n} != program width {width}"
                )
            f[0] = r.value
            nbytes = (width + 7) // 8
            tail = (lit.value << (8 * nbytes - width)).to_bytes(nbytes, "big")
        case Send(direction=d, reg=r) | Recv(direction=d, reg=r):
            f = [d.value, r.value, 0, 0, 0]
        case IncRow() | Halt():
            pass
    if not 0 <= arg <= 0xFFFF:
        raise MalformedBinary(f"field {arg} does not fit in 16 bits")
    return bytes([kind] + f) + arg.to_bytes(2, "big") + tail


def program_to_bytes(program: Program) -> bytes:
    width = program.width
    chunks = [MAGIC, (width or 0).to_bytes(2, "big")]
    flat = [
        program.cells[r][c] for r in range(GRID_SIZE) for c in range(GRID_SIZE)
    ]
    for code in flat:
        chunks.append(len(code).to_bytes(4, "big"))
    for code in flat:
        for inst in code:
            chunks.append(_encode_instr(inst, width))
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise MalformedBinary(
                f"truncated: wanted {count} bytes at offset {self.pos}"
            )
        chunk = self.data[self.pos : self.pos + count]
        self.pos += count
        return chunk


def _enum_of(enum_cls, value, what):
    try:
        return enum_cls(value)
    except ValueError:
        raise MalformedBinary(f"invalid {what} code {value}") from None


def program_from_bytes(data: bytes) -> Program:
    rd = _Reader(data)
    if rd.take(len(MAGIC)) != MAGIC:
        raise MalformedBinary("bad magic, not a LAMP1 program")
    width = int.from_bytes(rd.take(2), "big") or None
    counts = [int.from_bytes(rd.take(4), "big") for _ in range(GRID_SIZE**2)]
    program = Program(width=width)
    for idx, count in enumerate(counts):
        r, c = divmod(idx, GRID_SIZE)
        code = []
        for _ in range(count):
            rec = rd.take(8)
            kind = _CODE_KIND.get(rec[0])
            if kind is None:
                raise MalformedBinary(f"invalid instruction kind {rec[0]}")
            arg = int.from_bytes(rec[6:8], "big")
            try:
                if kind is Logic:
                    inst = Logic(
                        _enum_of(BinOp, rec[1], "binop"),
                        _enum_of(Reg, rec[2], "operand"),
                        _enum_of(Reg, rec[3], "operand"),
                        _enum_of(UnOp, rec[4], "unop"),
                        _enum_of(Reg, rec[5], "operand"),
                    )
                elif kind is Orf:
                    inst = Orf(_enum_of(Reg, rec[1], "operand"))
                elif kind in (Jump, JumpIfFlag, JumpIfNotFlag, JumpIfRowLt):
                    inst = kind(arg)
                elif kind is SetRow:
                    inst = SetRow(arg)
                elif kind is IncRow:
                    inst = IncRow()
                elif kind is LoadImm:
                    if width is None:
                        raise MalformedBinary("LOADM literal without a width")
                    nbytes = (width + 7) // 8
                    raw = int.from_bytes(rd.take(nbytes), "big")
                    pad = 8 * nbytes - width
                    if raw & ((1 << pad) - 1):
                        raise MalformedBinary("nonzero padding in LOADM literal")
                    inst = LoadImm(
                        _enum_of(Reg, rec[1], "operand"), BitVector(width, raw >> pad)
                    )
                elif kind in (Send, Recv):
                    inst = kind(
                        _enum_of(Dir, rec[1], "direction"),
                        _enum_of(Reg, rec[2], "operand"),
                    )
                else:
                    inst = Halt()
            except ValueError as exc:
                raise MalformedBinary(str(exc)) from None
            code.append(inst)
        program.cells[r][c] = code
    if rd.pos != len(data):
        raise MalformedBinary(f"{len(data) - rd.pos} trailing bytes")
    return program


def save_program(path, program: Program) -> None:
    with open(path, "wb") as fh:
        fh.write(program_to_bytes(program))


def load_program(path) -> Program:
    with open(path, "rb") as fh:
        return program_from_bytes(fh.read())
