import { mkdirSync, readFileSync, writeFileSync } from 'fs';
import { dirname } from 'path';
import { ComparisonReport, MalformedReportError, ThresholdStats } from './types';
import { DEFAULT_BOX, SvgDoc, fmt } from './svg';

export function readReport(path: string): ComparisonReport {
    let raw: unknown;
    try {
        raw = JSON.parse(readFileSync(path, 'utf8'));
    } catch (err) {
        throw new MalformedReportError(`cannot parse report ${path}: ${String(err)}`);
    }
    return validateReport(raw);
}

export function validateReport(raw: unknown): ComparisonReport {
    if (typeof raw !== 'object' || raw === null) {
        throw new MalformedReportError('report must be an object');
    }
    const rec = raw as Record<string, unknown>;
    if (typeof rec.threshold !== 'number') {
        throw new MalformedReportError('report is missing a numeric threshold');
    }
    const runs = rec.runs as Record<string, unknown> | undefined;
    if (!runs || typeof runs !== 'object' || !('a' in runs) || !('b' in runs)) {
        throw new MalformedReportError('report must contain runs.a and runs.b');
    }
    for (const key of ['a', 'b'] as const) {
        const run = runs[key] as Record<string, unknown>;
        if (typeof run !== 'object' || run === null || typeof run.reached !== 'boolean'
            || !('episodes_to_threshold' in run)) {
            throw new MalformedReportError(`runs.${key} is missing threshold data`);
        }
    }
    return raw as ComparisonReport;
}

function barValue(stats: ThresholdStats, total: number): number {
    if (stats.reached && stats.episodes_to_threshold !== null) {
        return stats.episodes_to_threshold;
    }
    return total;
}

export function renderComparison(report: ComparisonReport, output: string): string {
    validateReport(report);
    const box = { ...DEFAULT_BOX, width: 520, height: 360 };
    const doc = new SvgDoc(box.width, box.height);
    const a = report.runs.a;
    const b = report.runs.b;
    const totals = Math.max(a.total_episodes ?? 0, b.total_episodes ?? 0, 1);
    const va = barValue(a, totals);
    const vb = barValue(b, totals);
    const top = Math.max(va, vb, 1);
    const plotH = box.height - box.top - box.bottom;
    const baseY = box.height - box.bottom;
    const barW = 110;
    const entries: Array<[string, number, boolean, string]> = [
        ['run A', va, a.reached, '#4c78a8'],
        ['run B', vb, b.reached, '#f58518'],
    ];
    entries.forEach(([label, value, reached, color], i) => {
        const x = box.left + 60 + i * (barW + 80);
        const h = (value / top) * plotH;
        doc.rect(x, baseY - h, barW, h, color);
        doc.text(x + barW / 2, baseY + 16, label, 12, 'middle');
        const caption = reached ? `${value} eps` : `not reached (>${value})`;
        doc.text(x + barW / 2, baseY - h - 6, caption, 11, 'middle');
    });
    doc.line(box.left, baseY, box.width - box.right, baseY, '#444');
    doc.text(box.width / 2, 20,
        `episodes to win-rate ${fmt(report.threshold)}`, 14, 'middle');
    const ratioText = report.episodes_ratio === null
        ? 'ratio: n/a'
        : `ratio A/B: ${fmt(report.episodes_ratio)}`;
    doc.text(box.width / 2, 40, ratioText, 12, 'middle');

    const svg = doc.render();
    mkdirSync(dirname(output), { recursive: true });
    writeFileSync(output, svg);
    return output;
}
