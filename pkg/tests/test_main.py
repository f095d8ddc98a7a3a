# pyNESS
#
# Copyright (C) 2026 pyNESS developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import json

from click.testing import CliRunner
import pytest

from pyness.main import main
from pyness.readers.model_file import write_model
from pyness.readers.sweep_table import load_sweep_table
from tests.models import random_model


def _run(*args: str):
    return CliRunner().invoke(main, ['--loglevel', 'WARNING', *args])


def _json_line(output: str) -> dict:
    return json.loads(next(line for line in output.splitlines() if line.startswith('{')))


def test_solve_chain(tmp_path):
    prefix = str(tmp_path / 'out' / 'chain')
    result = _run('solve', '--chain', 'N=8,alpha=1.5,sigma=2', '-o', prefix, '-c', '1')
    assert result.exit_code == 0, result.output

    with open(f"{prefix}.report.json") as fh:
        doc = json.load(fh)
    assert doc['convention'] == 'generator-v1'
    assert doc['solver']['strategy'] == 'restricted_per_element'
    assert doc['chain']['n_sites'] == 8
    assert doc['transport']['R_SS'] == pytest.approx(1.0 / doc['transport']['J_in'])

    with open(f"{prefix}.profile.csv") as fh:
        lines = [line for line in fh if not line.startswith('#')]
    assert len(lines) == 8


def test_solve_model_file_not_boundary_driven(tmp_path):
    model_fp = str(tmp_path / 'model.json')
    write_model(model_fp, random_model(2, n=3, dephasing='none'))
    prefix = str(tmp_path / 'random')
    result = _run('solve', '-m', model_fp, '-o', prefix, '-c', '1')
    assert result.exit_code == 0, result.output
    with open(f"{prefix}.report.json") as fh:
        doc = json.load(fh)
    assert 'transport' not in doc
    assert doc['solver']['strategy'] == 'lyapunov_only'


def test_solve_requires_one_source(tmp_path):
    result = _run('solve', '-o', str(tmp_path / 'x'))
    assert result.exit_code == 2


@pytest.mark.parametrize('chain', ['N=1,alpha=1.5', 'N=8,alpha=0'])
def test_solve_invalid_chain(tmp_path, chain: str):
    result = _run('solve', '--chain', chain, '-o', str(tmp_path / 'x'), '-c', '1')
    assert result.exit_code == 2
    assert _json_line(result.output)['error'] == 'InvalidModelError'


def test_chain_spec_invalid(tmp_path):
    result = _run('solve', '--chain', 'N=8,beta=2', '-o', str(tmp_path / 'x'))
    assert result.exit_code == 2


def test_validate(tmp_path):
    model_fp = tmp_path / 'model.json'
    model_fp.write_text(json.dumps({
        'n_modes': 2,
        'hopping': [[0, 1], [1, 0]],
        'gamma_plus': [[0, 0], [0, 0]],
        'gamma_minus': [[0, 0], [0, 0]],
        'sigma': [[0, 1], [1, 0]]
    }))
    result = _run('validate', '-m', str(model_fp))
    assert result.exit_code == 2
    doc = _json_line(result.output)
    assert doc['violations'] == [{'matrix': 'sigma', 'property': 'PSD', 'defect': 1.0}]

    result = _run('validate', '--chain', 'N=4,alpha=2')
    assert result.exit_code == 0


def test_sweep_and_fit(tmp_path):
    table = str(tmp_path / 'sweep.csv')
    args = ['sweep', '-o', table, '--alpha', '1.2', '--alpha', '1.4', '--size', '4', '--size', '6', '--sigma', '2', '-c', '1']
    result = _run(*args)
    assert result.exit_code == 0, result.output
    assert len(load_sweep_table(table)) == 4

    result = _run(*args[:-4], '--size', '8', '--sigma', '2', '--resume', '-c', '1')
    assert result.exit_code == 0, result.output
    assert [r.n_sites for r in load_sweep_table(table)] == [4, 6, 8, 4, 6, 8]

    report = str(tmp_path / 'fit.json')
    result = _run('fit', table, '-o', report)
    assert result.exit_code == 0, result.output
    with open(report) as fh:
        doc = json.load(fh)
    assert [f['alpha'] for f in doc['fits']] == [1.2, 1.4]
    assert doc['fits'][0]['q'] == 3
    assert isinstance(doc['critical_point'], str)


def test_sweep_empty_grid(tmp_path):
    result = _run('sweep', '-o', str(tmp_path / 'sweep.csv'), '-c', '1')
    assert result.exit_code == 2


def test_sweep_resume_malformed_table(tmp_path):
    table = tmp_path / 'sweep.csv'
    table.write_text("2.0,4,0.5,2.0,0.1,ok\n")
    result = _run('sweep', '-o', str(table), '--alpha', '2', '--size', '4', '--sigma', '2', '--resume', '-c', '1')
    assert result.exit_code == 2
    assert _json_line(result.output)['error'] == 'InvalidGridError'


def test_dynamics(tmp_path):
    out = str(tmp_path / 'trajectory.csv')
    result = _run('dynamics', '--chain', 'N=3,alpha=2,sigma=1', '-o', out, '--t-final', '2', '--record-every', '5')
    assert result.exit_code == 0, result.output
    with open(out) as fh:
        lines = fh.readlines()
    assert lines[3] == '#t,n_1,n_2,n_3,residual\n'
