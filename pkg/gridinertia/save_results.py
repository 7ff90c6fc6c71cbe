import csv
import json
import os
import numpy as np
import gridinertia.constants as constants
from gridinertia.helpers import format_float
from gridinertia.metrics import MetricsReport

constants.init()


def get_directory(directory):
    directory = constants.OUTPUT_DIR if directory is None else directory
    if not os.path.exists(directory):
        os.makedirs(directory)
    return directory


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if value is None:
        return ''
    return str(value)


def write_rows(filename, header, rows):
    with open(filename, 'w', newline='') as csvFile:
        writer = csv.writer(csvFile, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return filename


def save_metrics(reports, directory=None, filename='metrics.csv'):
    """ One row per (scenario_id, MetricsReport), sorted by scenario id """
    rows = [report.csv_row(scenarioId) for scenarioId, report in sorted(reports, key=lambda r: r[0])]
    return write_rows(os.path.join(get_directory(directory), filename), MetricsReport.CSV_HEADER, rows)


def save_sweep(sweep, directory=None, filename='sweep.csv'):
    return write_rows(os.path.join(get_directory(directory), filename), ('alpha', 'beta', 'metric', 'ratio'),
                      sweep.rows())


def save_campaign(campaign, directory=None, filename='campaign.csv'):
    metrics = list(campaign.rows[0]['ratios'].keys()) if campaign.rows else list(constants.METRIC_NAMES)
    header = ['node', 'rank', 'class', 'P'] + ['%s_ratio' % m for m in metrics] + ['converged']
    rows = [[row['node'], row['rank'], row['class'], row['P']] + [row['ratios'].get(m, np.nan) for m in metrics] +
            [row['converged']] for row in campaign.rows]
    return write_rows(os.path.join(get_directory(directory), filename), header, rows)


def to_jsonable(obj):
    """ Plain JSON types; nan becomes null and infinities the strings 'inf' / '-inf' """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if hasattr(obj, '_asdict'):
        return to_jsonable(obj._asdict())
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if np.isnan(obj):
            return None
        if np.isinf(obj):
            return 'inf' if obj > 0 else '-inf'
        return float(obj)
    if hasattr(obj, 'as_dict'):
        return to_jsonable(obj.as_dict())
    return obj


def save_report(report, directory=None, filename='report.json'):
    path = os.path.join(get_directory(directory), filename)
    with open(path, 'w') as f:
        json.dump(to_jsonable(report), f, indent=2, sort_keys=True)
    return path
