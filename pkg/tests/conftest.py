import numpy as np
import pytest

from twpakit.circuit import JosephsonJunction, KineticCell, RfSquidCell
from twpakit.dispersion import LineSpec


@pytest.fixture
def prototype_junction():
    return JosephsonJunction(critical_current=1.5e-6, self_capacitance=25.8e-15)


@pytest.fixture
def prototype_cell(prototype_junction):
    return RfSquidCell(
        geometric_inductance=45e-12,
        junction=prototype_junction,
        ground_capacitance=13e-15,
    )


@pytest.fixture
def prototype_line(prototype_cell):
    return LineSpec(base_cell=prototype_cell, n_cells=990)


@pytest.fixture
def kinetic_cell():
    # 50 ohm artificial line, ~120 cells per wavelength at 9.2 GHz
    return KineticCell(
        series_inductance=44.5e-12,
        finger_inductance=10e-12,
        ground_capacitance=17.8e-15,
        scale_current=1e-3,
    )


@pytest.fixture
def kinetic_line(kinetic_cell):
    return LineSpec(base_cell=kinetic_cell, n_cells=990)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
