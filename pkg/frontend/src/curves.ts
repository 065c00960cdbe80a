import { mkdirSync, writeFileSync } from 'fs';
import { dirname } from 'path';
import { Aggregate, Series, aggregate, hasEvalValues, readJsonl, smooth, xValue, yValue } from './metrics';
import { CurveSpec, EmptyMetricsError, UnknownAxisError } from './types';
import { DEFAULT_BOX, Scale, SvgDoc, axes, fmt } from './svg';

const SEED_COLORS = ['#6baed6', '#fd8d3c', '#74c476', '#9e9ac8', '#e377c2', '#8c8c8c'];

const X_AXES = new Set(['episodes', 'iterations', 'wall-clock']);
const Y_AXES = new Set(['win-rate', 'difficulty', 'loss']);

export interface CurveData {
    series: Series[];
    aggregate: Aggregate;
}

/** Parse the metric streams into per-seed series plus the cross-seed aggregate. */
export function computeCurves(spec: CurveSpec): CurveData {
    if (!X_AXES.has(spec.x)) {
        throw new UnknownAxisError(`unknown x axis ${spec.x}`);
    }
    if (!Y_AXES.has(spec.y)) {
        throw new UnknownAxisError(`unknown y axis ${spec.y}`);
    }
    if (!Array.isArray(spec.inputs) || spec.inputs.length === 0) {
        throw new EmptyMetricsError('curve spec lists no inputs');
    }
    const window = Math.max(1, Math.floor(spec.smoothing ?? 1));
    const series: Series[] = spec.inputs.map(path => {
        const records = readJsonl(path);
        const useEval = hasEvalValues(records);
        return {
            label: records[0].run_id,
            xs: records.map(r => xValue(r, spec.x)),
            ys: smooth(records.map(r => yValue(r, spec.y, useEval)), window),
        };
    });
    return { series, aggregate: aggregate(series) };
}

export function renderCurves(spec: CurveSpec): string {
    const { series, aggregate: agg } = computeCurves(spec);
    const box = DEFAULT_BOX;
    const allX = series.flatMap(s => s.xs);
    const allY = series.flatMap(s => s.ys).concat(agg.min, agg.max);
    const xs = new Scale(Math.min(...allX), Math.max(...allX), box.left, box.width - box.right);
    const lo = Math.min(...allY);
    const hi = Math.max(...allY);
    const pad = (hi - lo) * 0.05 || 0.05;
    const ys = new Scale(lo - pad, hi + pad, box.height - box.bottom, box.top);

    const doc = new SvgDoc(box.width, box.height);

    // min-max band behind everything
    const upper: Array<[number, number]> = agg.xs.map((x, i) => [xs.map(x), ys.map(agg.max[i])]);
    const lower: Array<[number, number]> = agg.xs.map((x, i) => [xs.map(x), ys.map(agg.min[i])]);
    doc.polygon(upper.concat(lower.reverse()), '#444', 0.15);

    series.forEach((s, i) => {
        const pts: Array<[number, number]> = s.xs.map((x, k) => [xs.map(x), ys.map(s.ys[k])]);
        doc.polyline(pts, SEED_COLORS[i % SEED_COLORS.length], 1, 0.6);
    });
    const meanPts: Array<[number, number]> = agg.xs.map((x, i) => [xs.map(x), ys.map(agg.mean[i])]);
    doc.polyline(meanPts, '#222', 2);

    const xTicks: Array<[number, string]> = [];
    const yTicks: Array<[number, string]> = [];
    for (let i = 0; i <= 4; i++) {
        const xv = Math.min(...allX) + (i / 4) * (Math.max(...allX) - Math.min(...allX));
        xTicks.push([xs.map(xv), fmt(xv)]);
        const yv = (lo - pad) + (i / 4) * ((hi + pad) - (lo - pad));
        yTicks.push([ys.map(yv), fmt(yv)]);
    }
    axes(doc, box, spec.x, spec.y, xTicks, yTicks);
    doc.text(box.width / 2, 20, spec.title ?? `${spec.y} vs ${spec.x} (${series.length} seeds)`,
        14, 'middle');

    const svg = doc.render();
    mkdirSync(dirname(spec.output), { recursive: true });
    writeFileSync(spec.output, svg);
    return spec.output;
}
