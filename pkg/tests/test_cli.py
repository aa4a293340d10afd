import csv
import json
import os

import pytest

from floqeels import (EXIT_INPUT_ERROR, EXIT_NUMERICAL_FAILURE, EXIT_OK,
                      EXIT_VALIDATION_FAILURE, __version__)
from floqeels.cli import build_parser, main
from floqeels.model import builtin_scenario, save_config


def _rows(path):
    with open(path) as handle:
        lines = [line for line in handle if not line.startswith('#')]

    return list(csv.DictReader(lines))


def _manifest(out_dir):
    with open(os.path.join(out_dir, 'manifest.json')) as handle:
        return json.load(handle)


def test_spectrum_of_the_undriven_atom(tmp_path):
    out_dir = str(tmp_path / 'run')
    code = main(['spectrum', '--scenario', 'two_level', '--rabi', '0',
                 '--out', out_dir])

    assert code == EXIT_OK
    peaks = _rows(os.path.join(out_dir, 'peaks.csv'))
    assert len(peaks) == 1
    assert (peaks[0]['j'], peaks[0]['jp'], peaks[0]['l']) == ('1', '0', '1')
    assert float(peaks[0]['omega']) == pytest.approx(1.0)
    assert float(peaks[0]['prob']) == pytest.approx(1.0, abs=1e-8)
    spectrum = _rows(os.path.join(out_dir, 'spectrum.csv'))
    assert len(spectrum) == 6001

    manifest = _manifest(out_dir)
    assert manifest['version'] == __version__
    assert manifest['config']['drive']['omega_l'] == 1.2
    assert sorted(os.path.basename(path) for path in manifest['outputs']) == \
        ['peaks.csv', 'spectrum.csv']
    assert 'floquet' in manifest['timings']


def test_spectrum_with_reference(tmp_path):
    out_dir = str(tmp_path)
    code = main(['spectrum', '--omega-axis=-2:2:401', '--reference',
                 '--out', out_dir])

    assert code == EXIT_OK
    for name in ('spectrum.csv', 'peaks.csv', 'reference_spectrum.csv',
                 'reference_peaks.csv'):
        assert os.path.exists(os.path.join(out_dir, name))
    assert len(_rows(os.path.join(out_dir, 'reference_peaks.csv'))) == 1


def test_spectrum_from_config(tmp_path):
    config = str(tmp_path / 'lambda_b.json')
    save_config(config, *builtin_scenario('lambda_b'))
    code = main(['spectrum', '--config', config, '--omega-axis=-2:2:401',
                 '--impact-parameter', '1.0', '--velocity', '0.5',
                 '--out', str(tmp_path)])

    assert code == EXIT_OK
    assert _manifest(str(tmp_path))['config']['geometry'] == {
        'impact_parameter': 1.0, 'velocity': 0.5}


def test_map(tmp_path):
    code = main(['map', '--sweep', 'rabi:0:0.4:3', '--omega-axis=-2:2:401',
                 '--out', str(tmp_path)])

    assert code == EXIT_OK
    with open(os.path.join(str(tmp_path), 'map.txt')) as handle:
        rows = [line.split() for line in handle if not line.startswith('#')]
    assert len(rows) == 3
    assert all(len(row) == 401 for row in rows)
    status = _rows(os.path.join(str(tmp_path), 'map_rows.csv'))
    assert [row['status'] for row in status] == ['ok', 'ok', 'ok']
    manifest = _manifest(str(tmp_path))
    assert manifest['config']['drive']['omega_l'] == 1.2
    assert manifest['timings']['map'] > 0


def test_map_is_reproducible(tmp_path):
    outputs = []
    for threads in ('1', '2'):
        out_dir = str(tmp_path / threads)
        assert main(['map', '--sweep', 'omega_l:0.9:1.2:3',
                     '--omega-axis=-2:2:401', '--threads', threads,
                     '--out', out_dir]) == EXIT_OK
        with open(os.path.join(out_dir, 'map.txt'), 'rb') as handle:
            outputs.append(handle.read())

    assert outputs[0] == outputs[1]


def test_map_range_too_short(tmp_path, capsys):
    code = main(['map', '--sweep', 'rabi:0:0.4:1', '--out', str(tmp_path)])

    assert code == EXIT_INPUT_ERROR
    assert 'range too short' in capsys.readouterr().err


def test_map_where_every_row_fails(tmp_path):
    code = main(['map', '--sweep', 'rabi:-0.2:-0.1:2', '--omega-axis=-1:1:11',
                 '--out', str(tmp_path)])

    assert code == EXIT_NUMERICAL_FAILURE
    status = _rows(os.path.join(str(tmp_path), 'map_rows.csv'))
    assert [row['status'] for row in status] == ['failed', 'failed']


def test_floquet(tmp_path):
    code = main(['floquet', '--rabi', '0', '--sweep', 'rabi:0:0.2:3',
                 '--out', str(tmp_path)])

    assert code == EXIT_OK
    bands = _rows(os.path.join(str(tmp_path), 'floquet.csv'))
    assert [float(row['omega_tilde']) for row in bands] == \
        pytest.approx([0.0, -0.2], abs=1e-12)
    assert (bands[1]['a1'], bands[1]['l1'], bands[1]['f1']) == ('1', '1', '1')
    convergence = _rows(os.path.join(str(tmp_path), 'convergence.csv'))
    assert convergence[0]['converged'] == '1'
    stark = _rows(os.path.join(str(tmp_path), 'stark.csv'))
    assert len(stark) == 3
    assert float(stark[2]['delta_omega']) < 0


def test_steady(tmp_path):
    code = main(['steady', '--method', 'time', '--dump',
                 '--out', str(tmp_path)])

    assert code == EXIT_OK
    populations = _rows(os.path.join(str(tmp_path), 'populations.csv'))
    assert [row['basis'] for row in populations] == \
        ['level', 'level', 'floquet', 'floquet']
    assert populations[0]['name'] == 'g'
    assert sum(float(row['population']) for row in populations[:2]) == \
        pytest.approx(1.0)
    assert os.path.exists(os.path.join(str(tmp_path), 'coefficients.csv'))


def test_steady_population_map(tmp_path):
    code = main(['steady', '--sweep-omega-l', '0.9:1.1:3', '--sweep-rabi',
                 '0.2:0.4:2', '--out', str(tmp_path)])

    assert code == EXIT_OK
    with open(os.path.join(str(tmp_path), 'population_map.txt')) as handle:
        rows = [line.split() for line in handle if not line.startswith('#')]
    assert [len(row) for row in rows] == [3, 3]


def test_steady_sweeps_go_together(tmp_path):
    code = main(['steady', '--sweep-rabi', '0.2:0.4:2', '--out',
                 str(tmp_path)])

    assert code == EXIT_INPUT_ERROR


def test_validate(tmp_path, capsys):
    code = main(['validate', 'two_level', '--out', str(tmp_path)])

    assert code == EXIT_OK
    assert 'overall: PASS' in capsys.readouterr().out
    with open(os.path.join(str(tmp_path), 'report.json')) as handle:
        report = json.load(handle)
    assert report['passed'] is True
    assert report['scenario'] == 'two_level'


def test_validate_with_overrides(tmp_path):
    code = main(['validate', 'two_level', '--rabi', '0.05', '--omega-l', '0.9',
                 '--out', str(tmp_path)])

    assert code == EXIT_OK
    with open(os.path.join(str(tmp_path), 'report.json')) as handle:
        report = json.load(handle)
    assert report['scenario'] == 'two_level'
    assert report['checks'][0]['detail'] == \
        '2 levels, omega_l=0.9, rabi=0.05'
    assert 'parity' in [check['name'] for check in report['checks']]
    manifest = _manifest(str(tmp_path))
    assert manifest['config']['drive']['omega_l'] == 0.9
    assert manifest['config']['rabi'][0][1] == pytest.approx(0.05)
    assert 'validate' in manifest['timings']


def test_validate_rejected_override(tmp_path):
    code = main(['validate', '--rabi', '-0.1', '--out', str(tmp_path)])

    assert code == EXIT_VALIDATION_FAILURE
    manifest = _manifest(str(tmp_path))
    assert manifest['config'] is None
    assert manifest['outputs'] == ['report.json']


def test_validate_missing_config(tmp_path):
    code = main(['validate', '--config', str(tmp_path / 'missing.json'),
                 '--out', str(tmp_path)])

    assert code == EXIT_VALIDATION_FAILURE


def test_bad_config(tmp_path):
    config = tmp_path / 'bad.json'
    config.write_text('{"levels": [{"energy": 0}], "drive": {"omega_l": 1}}')

    assert main(['spectrum', '--config', str(config), '--out',
                 str(tmp_path)]) == EXIT_INPUT_ERROR
    assert main(['spectrum', '--config', str(tmp_path / 'missing.json'),
                 '--out', str(tmp_path)]) == EXIT_INPUT_ERROR


def test_numerical_failure(tmp_path):
    config = str(tmp_path / 'undamped.json')
    save_config(config, *builtin_scenario('two_level', decay=0.0))

    assert main(['spectrum', '--config', config, '--out',
                 str(tmp_path)]) == EXIT_NUMERICAL_FAILURE
    assert not os.path.exists(os.path.join(str(tmp_path), 'manifest.json'))


@pytest.mark.parametrize('argv', [
    [],
    ['fit'],
    ['spectrum', '--scenario', 'three_level'],
    ['spectrum', '--config', 'a.json', '--scenario', 'two_level'],
])
def test_argument_errors(argv):
    with pytest.raises(SystemExit) as error:
        build_parser().parse_args(argv)

    assert error.value.code == EXIT_INPUT_ERROR
