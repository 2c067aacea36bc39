"""Reference values transcribed by hand, shared by several test modules."""

from rnnbench.cells import CellKind as K

# Closed forms copied from the evaluated-models table, written independently
# of the package's coefficient tuples.
FORMULAS = {
    K.NIG: "3*nI*nH + 3*nH**2 + 3*nH",
    K.NFG: "3*nI*nH + 3*nH**2 + 3*nH",
    K.NOG: "3*nI*nH + 3*nH**2 + 3*nH",
    K.CIFG: "3*nI*nH + 3*nH**2 + 3*nH",
    K.FB1: "4*nI*nH + 4*nH**2 + 3*nH",
    K.NIAF: "4*nI*nH + 4*nH**2 + 4*nH",
    K.NFAF: "4*nI*nH + 4*nH**2 + 4*nH",
    K.NOAF: "4*nI*nH + 4*nH**2 + 4*nH",
    K.NCAF: "4*nI*nH + 4*nH**2 + 4*nH",
    K.LSTM_VANILLA: "4*nI*nH + 4*nH**2 + 4*nH",
    K.PC: "4*nI*nH + 7*nH**2 + 4*nH",
    K.FGR: "4*nI*nH + 13*nH**2 + 4*nH",
    K.ELMAN: "nI*nH + nH**2 + nH",
    K.IRNN: "nI*nH + nH**2 + nH",
    K.JORDAN: "nI*nH + nO*nH + nH",
    K.MRNN: "nI*nH + nH**2 + nO*nH + nH",
    K.SCRN: "nI*nS + nI*nH + nH**2 + nS*nH + nH",
    K.MGU_SLIM3: "nI*nH + nH**2 + 2*nH",
    K.MGU_SLIM2: "nI*nH + 2*nH**2 + nH",
    K.MGU_SLIM1: "nI*nH + 2*nH**2 + 2*nH",
    K.MGU: "2*nI*nH + 2*nH**2 + 2*nH",
    K.GRU_SLIM3: "nI*nH + nH**2 + 3*nH",
    K.GRU_SLIM2: "nI*nH + 3*nH**2 + nH",
    K.GRU_SLIM1: "nI*nH + 3*nH**2 + 3*nH",
    K.MUT1: "2*nI*nH + 2*nH**2 + 3*nH",
    K.MUT2: "2*nI*nH + 3*nH**2 + 3*nH",
    K.MUT3: "3*nI*nH + 3*nH**2 + 3*nH",
    K.GRU: "3*nI*nH + 3*nH**2 + 3*nH",
    K.LSTM_SLIM3: "nI*nH + nH**2 + 4*nH",
    K.LSTM_SLIM2: "nI*nH + 4*nH**2 + nH",
    K.LSTM_SLIM1: "nI*nH + 4*nH**2 + 4*nH",
}

# (weight matrices, bias vectors) columns of the same table.
TABLE_COUNTS = {
    K.NIG: (6, 3), K.NFG: (6, 3), K.NOG: (6, 3), K.CIFG: (6, 3), K.FB1: (6, 3),
    K.NIAF: (8, 4), K.NFAF: (8, 4), K.NOAF: (8, 4), K.NCAF: (8, 4),
    K.LSTM_VANILLA: (8, 4), K.PC: (11, 4), K.FGR: (17, 4), K.ELMAN: (2, 1),
    K.IRNN: (2, 1), K.JORDAN: (2, 1), K.MRNN: (3, 1), K.SCRN: (4, 1),
    K.MGU_SLIM3: (2, 2), K.MGU_SLIM2: (3, 1), K.MGU_SLIM1: (3, 2), K.MGU: (4, 2),
    K.GRU_SLIM3: (2, 3), K.GRU_SLIM2: (4, 1), K.GRU_SLIM1: (4, 3), K.MUT1: (4, 3),
    K.MUT2: (5, 3), K.MUT3: (6, 3), K.GRU: (6, 3), K.LSTM_SLIM3: (2, 4),
    K.LSTM_SLIM2: (5, 1), K.LSTM_SLIM1: (5, 4),
}


def formula(kind, n_I, n_H, n_O=1, n_S=None):
    return eval(FORMULAS[kind], {"nI": n_I, "nH": n_H, "nO": n_O, "nS": n_H if n_S is None else n_S})
