import { readFileSync } from 'fs';
import { EmptyMetricsError, MetricsRecord, UnknownAxisError, XAxis, YAxis } from './types';

export function readJsonl(path: string): MetricsRecord[] {
    const text = readFileSync(path, 'utf8');
    const records: MetricsRecord[] = [];
    for (const line of text.split('\n')) {
        const trimmed = line.trim();
        if (trimmed.length > 0) {
            records.push(JSON.parse(trimmed) as MetricsRecord);
        }
    }
    if (records.length === 0) {
        throw new EmptyMetricsError(`no records in ${path}`);
    }
    return records;
}

export function xValue(record: MetricsRecord, axis: XAxis): number {
    switch (axis) {
        case 'episodes': return record.episodes_total;
        case 'iterations': return record.iteration;
        case 'wall-clock': return record.wall_clock_ms;
        default: throw new UnknownAxisError(`unknown x axis ${axis as string}`);
    }
}

export function yValue(record: MetricsRecord, axis: YAxis, useEval: boolean): number {
    switch (axis) {
        case 'win-rate':
            return useEval && record.win_rate_eval !== null
                ? record.win_rate_eval
                : record.win_rate_window;
        case 'difficulty': return record.difficulty;
        case 'loss': return record.policy_loss;
        default: throw new UnknownAxisError(`unknown y axis ${axis as string}`);
    }
}

export function hasEvalValues(records: MetricsRecord[]): boolean {
    return records.some(r => r.win_rate_eval !== null);
}

/** Trailing moving average with the given window (window 1 is the identity). */
export function smooth(values: number[], window: number): number[] {
    if (window <= 1) {
        return values.slice();
    }
    const out: number[] = [];
    let acc = 0;
    for (let i = 0; i < values.length; i++) {
        acc += values[i];
        if (i >= window) {
            acc -= values[i - window];
        }
        out.push(acc / Math.min(i + 1, window));
    }
    return out;
}

export interface Series {
    label: string;
    xs: number[];
    ys: number[];
}

export interface Aggregate {
    xs: number[];
    mean: number[];
    min: number[];
    max: number[];
}

/**
 * Point-wise mean and min-max band across seeds, aligned by position in the
 * series (runs may stop early; each position aggregates the seeds that reach
 * it). The x values of the longest series carry the aggregate.
 */
export function aggregate(series: Series[]): Aggregate {
    const longest = series.reduce((a, b) => (b.xs.length > a.xs.length ? b : a));
    const n = longest.xs.length;
    const mean: number[] = [];
    const min: number[] = [];
    const max: number[] = [];
    for (let i = 0; i < n; i++) {
        const here = series.filter(s => i < s.ys.length).map(s => s.ys[i]);
        mean.push(here.reduce((a, b) => a + b, 0) / here.length);
        min.push(Math.min(...here));
        max.push(Math.max(...here));
    }
    return { xs: longest.xs.slice(), mean, min, max };
}
