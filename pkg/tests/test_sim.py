import pytest

from lamp.assoc import AssocTable, query
from lamp.bitvec import BitVector, sls, vxor
from lamp.errors import DeadlockDetected, InvalidRowIndex, PcOutOfRange
from lamp.quality import criterion_vector
from lamp.sim import (
    GRID_SIZE,
    BinOp,
    Dir,
    Grid,
    Halt,
    IncRow,
    Jump,
    JumpIfRowLt,
    LoadImm,
    Logic,
    Orf,
    Program,
    Recv,
    Reg,
    RunOutcome,
    Send,
    Sequencer,
    SetRow,
    UnOp,
    builtin_query_program,
    neighbor,
    opposite,
)

bv = BitVector.parse

M12 = bv("110011001100")
A12 = bv("000011110101")


def one_cell_grid(instructions, width, table=None, ma=None):
    g = Grid(width)
    g.load_program(Program.single_cell(instructions))
    if table:
        g.set_table(table, at=(0, 0))
    if ma is not None:
        g.set_register(Reg.MA, ma, at=(0, 0))
    return g


# --- single sequencer steps -----------------------------------------------


def test_logic_xor_with_row_builds_difference_vector():
    seq = Sequencer(
        12,
        program=[Logic(BinOp.XOR, Reg.MA, Reg.ROW, UnOp.NOPU, Reg.MB), Halt()],
        a_matrix=[A12],
    )
    seq.regs[Reg.MA] = M12
    seq.step()
    assert seq.regs[Reg.MB] == vxor(M12, A12)
    assert seq.regs[Reg.MB].ones_count() == 6
    assert seq.cycles == 1


def test_pass_slc_compacts_in_one_cycle():
    seq = Sequencer(
        9, program=[Logic(BinOp.PASS, Reg.MA, Reg.MA, UnOp.SLC, Reg.MA), Halt()]
    )
    seq.regs[Reg.MA] = bv("010000101")
    seq.step()
    assert seq.regs[Reg.MA] == bv("111000000")
    assert seq.cycles == 1


def test_orf_zero_register_clears_flag():
    seq = Sequencer(4, program=[Orf(Reg.MA), Halt()])
    seq.flag = 1
    seq.step()
    assert seq.flag == 0


def test_orf_row_source():
    seq = Sequencer(4, program=[Orf(Reg.ROW), Halt()], a_matrix=[bv("0010")])
    seq.step()
    assert seq.flag == 1


def test_lone_exchange_step_stalls():
    seq = Sequencer(4, program=[Send(Dir.E, Reg.MA), Halt()])
    seq.step()
    assert seq.pc == 0  # no partner outside a grid: burn the cycle, hold pc
    assert seq.cycles == 1


def test_row_source_out_of_range():
    seq = Sequencer(
        4, program=[Logic(BinOp.PASS, Reg.ROW, Reg.ROW, UnOp.NOPU, Reg.MA)]
    )
    with pytest.raises(InvalidRowIndex):
        seq.step()


def test_setrow_incrow_bounds():
    seq = Sequencer(4, program=[SetRow(3)], a_matrix=[bv("0000")] * 2)
    with pytest.raises(InvalidRowIndex):
        seq.step()
    seq2 = Sequencer(4, program=[IncRow(), IncRow(), IncRow()],
                     a_matrix=[bv("0000")] * 2)
    seq2.step()
    seq2.step()  # row_idx == row_count is the legal past-the-end state
    with pytest.raises(InvalidRowIndex):
        seq2.step()


def test_jrlt_loops_over_rows():
    # INCROW/JRLT walk the matrix exactly row_count times
    prog = [IncRow(), JumpIfRowLt(0), Halt()]
    seq = Sequencer(4, program=prog, a_matrix=[bv("0000")] * 3)
    while not seq.halted:
        seq.step()
    assert seq.row_idx == 3
    assert seq.cycles == 3 * 2 + 1


def test_loadm_checks_width():
    from lamp.errors import WidthMismatch

    seq = Sequencer(4, program=[LoadImm(Reg.MA, bv("01"))])
    with pytest.raises(WidthMismatch):
        seq.step()


def test_pc_past_end_raises():
    seq = Sequencer(4, program=[Orf(Reg.MA)])
    seq.step()
    with pytest.raises(PcOutOfRange):
        seq.step()


def test_every_instruction_costs_one_cycle():
    prog = [
        Logic(BinOp.AND, Reg.MA, Reg.MB, UnOp.NOPU, Reg.MC),
        Logic(BinOp.OR, Reg.MA, Reg.MB, UnOp.NOT, Reg.MD),
        Orf(Reg.MD),
        Halt(),
    ]
    seq = Sequencer(8, program=prog)
    while not seq.halted:
        seq.step()
    assert seq.cycles == len(prog)


# --- grid topology -----------------------------------------------------------


def test_every_cell_has_eight_distinct_neighbors():
    for r in range(GRID_SIZE):
        for c in range(GRID_SIZE):
            seen = {neighbor(r, c, d) for d in Dir}
            assert len(seen) == 8
            assert (r, c) not in seen


def test_neighbor_symmetry_on_torus():
    for r in range(GRID_SIZE):
        for c in range(GRID_SIZE):
            for d in Dir:
                rr, cc = neighbor(r, c, d)
                assert neighbor(rr, cc, opposite(d)) == (r, c)


# --- exchange -----------------------------------------------------------------


def test_send_recv_rendezvous_in_one_cycle():
    g = Grid(4)
    prog = Program()
    prog.cells[0][0] = [Send(Dir.E, Reg.MA), Halt()]
    prog.cells[0][1] = [Recv(Dir.W, Reg.MB), Halt()]
    g.load_program(prog)
    g.set_register(Reg.MA, bv("1011"), at=(0, 0))
    g.step()
    assert g.cell(0, 1).regs[Reg.MB] == bv("1011")
    assert g.cell(0, 0).pc == 1 and g.cell(0, 1).pc == 1
    assert g.global_cycle == 1


def test_unmatched_exchange_stalls_until_partner_arrives():
    g = Grid(4)
    prog = Program()
    prog.cells[0][0] = [Send(Dir.E, Reg.MA), Halt()]
    prog.cells[0][1] = [Orf(Reg.MA), Orf(Reg.MA), Recv(Dir.W, Reg.MB), Halt()]
    g.load_program(prog)
    g.set_register(Reg.MA, bv("0110"), at=(0, 0))
    res = g.run(100)
    assert res.outcome is RunOutcome.ALL_HALTED
    assert g.cell(0, 1).regs[Reg.MB] == bv("0110")
    # sender stalled two cycles waiting, then transferred, then halted
    assert g.cell(0, 0).cycles == 4


def test_two_facing_sends_deadlock():
    g = Grid(4)
    prog = Program()
    prog.cells[0][0] = [Send(Dir.E, Reg.MA)]
    prog.cells[0][1] = [Send(Dir.W, Reg.MA)]
    g.load_program(prog)
    with pytest.raises(DeadlockDetected) as err:
        g.step()
    assert set(err.value.cells) == {(0, 0), (0, 1)}


def test_run_reports_deadlock_outcome():
    g = Grid(4)
    prog = Program()
    prog.cells[1][1] = [Recv(Dir.N, Reg.MA)]
    g.load_program(prog)
    res = g.run(50)
    assert res.outcome is RunOutcome.DEADLOCK
    assert res.deadlocked == ((1, 1),)


def test_transfer_uses_senders_start_of_cycle_value():
    # receiver is scanned before the sender cell; value must still be
    # the one the sender held when the cycle began
    g = Grid(4)
    prog = Program()
    prog.cells[0][1] = [Recv(Dir.E, Reg.MB), Halt()]  # from (0,2)
    prog.cells[0][2] = [Send(Dir.W, Reg.MA), Halt()]
    g.load_program(prog)
    g.set_register(Reg.MA, bv("1111"), at=(0, 2))
    g.step()
    assert g.cell(0, 1).regs[Reg.MB] == bv("1111")


def test_all_halted_grid_does_not_tick():
    g = Grid(4)
    g.load_program(Program())  # every cell empty, so everything is halted
    assert g.all_halted
    g.step()
    assert g.global_cycle == 0


# --- run outcomes -------------------------------------------------------------


def test_halt_only_programs_finish_at_cycle_one():
    g = Grid(4)
    g.load_program(Program.broadcast([Halt()]))
    res = g.run(10)
    assert res.outcome is RunOutcome.ALL_HALTED
    assert res.cycles == 1


def test_infinite_loop_exhausts_budget():
    g = Grid(4)
    g.load_program(Program.single_cell([Jump(0)]))
    res = g.run(37)
    assert res.outcome is RunOutcome.CYCLE_BUDGET_EXHAUSTED
    assert res.cycles == 37


def test_error_carries_cell_coordinates():
    g = Grid(4)
    g.load_program(
        Program.single_cell(
            [Logic(BinOp.PASS, Reg.ROW, Reg.ROW, UnOp.NOPU, Reg.MA)], at=(2, 3)
        )
    )
    with pytest.raises(InvalidRowIndex) as err:
        g.run(10)
    assert "(2,3)" in str(err.value)


def test_trace_lines_one_per_active_cell_per_cycle():
    g = Grid(4, tracing=True)
    g.load_program(Program.single_cell([Orf(Reg.MA), Halt()]))
    g.run(10)
    assert g.trace == ["1\t0,0\t0\tORF MA", "2\t0,0\t1\tHALT"]


# --- builtin query program -----------------------------------------------------


def run_builtin(table_rows, m, width):
    g = one_cell_grid(
        builtin_query_program(len(table_rows)), width, table=table_rows, ma=m
    )
    res = g.run(100_000)
    assert res.outcome is RunOutcome.ALL_HALTED
    return g.cell(0, 0)


def test_builtin_single_row_leaves_compacted_quality_in_md():
    seq = run_builtin([A12], M12, 12)
    expect = sls(criterion_vector(M12, A12).q_vec)
    assert seq.regs[Reg.MD] == expect
    assert seq.regs[Reg.MC] == A12  # winner pattern parked in MC


def test_builtin_perfect_match_wins_with_zero_vector():
    rows = [M12, A12]
    seq = run_builtin(rows, M12, 12)
    assert seq.regs[Reg.MD] == BitVector.zeros(12)
    assert seq.regs[Reg.MC] == M12


def test_builtin_matches_library_query_on_worked_rows():
    rows = [A12, bv("111111111111")]
    seq = run_builtin(rows, M12, 12)
    table = AssocTable.from_rows(rows)
    lib = query(table, M12)
    win = lib.best_rows[0][0] - 1
    assert seq.regs[Reg.MC] == rows[win]
    assert seq.regs[Reg.MD] == sls(criterion_vector(M12, rows[win]).q_vec)


def test_builtin_rejects_zero_rows():
    with pytest.raises(ValueError):
        builtin_query_program(0)


def test_missing_table_surfaces_invalid_row_index():
    g = one_cell_grid(builtin_query_program(2), 12, table=None, ma=M12)
    with pytest.raises(InvalidRowIndex):
        g.run(1000)


def test_determinism_bit_identical_reruns():
    rows = [bv("0101"), bv("0011"), bv("1110")]
    runs = []
    for _ in range(2):
        g = one_cell_grid(builtin_query_program(3), 4, table=rows, ma=bv("0111"))
        res = g.run(10_000)
        seq = g.cell(0, 0)
        runs.append(
            (
                res.outcome,
                res.cycles,
                seq.cycles,
                tuple(seq.regs[r].value for r in (Reg.MA, Reg.MB, Reg.MC, Reg.MD)),
                seq.flag,
                seq.row_idx,
            )
        )
    assert runs[0] == runs[1]


def test_straight_line_grid_cycles_equal_instruction_count():
    body = [Logic(BinOp.XOR, Reg.MA, Reg.MB, UnOp.NOPU, Reg.MC)] * 9 + [Halt()]
    g = Grid(6)
    g.load_program(Program.single_cell(body))
    res = g.run(100)
    assert res.cycles == len(body)
    assert g.cell(0, 0).cycles == len(body)
