/** Minimal deterministic SVG assembly: identical inputs produce identical bytes. */

export interface Box {
    width: number;
    height: number;
    left: number;
    right: number;
    top: number;
    bottom: number;
}

export const DEFAULT_BOX: Box = { width: 720, height: 440, left: 60, right: 20, top: 36, bottom: 44 };

export function fmt(v: number): string {
    if (!Number.isFinite(v)) return '0';
    return Number(v.toFixed(3)).toString();
}

export class Scale {
    constructor(private lo: number, private hi: number,
                private outLo: number, private outHi: number) {
        if (this.hi === this.lo) {
            this.hi = this.lo + 1;
        }
    }

    map(v: number): number {
        const t = (v - this.lo) / (this.hi - this.lo);
        return this.outLo + t * (this.outHi - this.outLo);
    }
}

export class SvgDoc {
    private parts: string[] = [];

    constructor(private width: number, private height: number) {
        this.parts.push(
            `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
            `viewBox="0 0 ${width} ${height}" font-family="sans-serif">`);
        this.parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    }

    polyline(points: Array<[number, number]>, stroke: string, width: number, opacity = 1): void {
        if (points.length === 0) return;
        const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(' ');
        this.parts.push(
            `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
            `stroke-width="${width}" stroke-opacity="${fmt(opacity)}"/>`);
    }

    polygon(points: Array<[number, number]>, fill: string, opacity: number): void {
        if (points.length === 0) return;
        const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(' ');
        this.parts.push(`<polygon points="${pts}" fill="${fill}" fill-opacity="${fmt(opacity)}"/>`);
    }

    rect(x: number, y: number, w: number, h: number, fill: string): void {
        this.parts.push(
            `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`);
    }

    line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
        this.parts.push(
            `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
            `stroke="${stroke}" stroke-width="${width}"/>`);
    }

    text(x: number, y: number, content: string, size = 12, anchor = 'start', fill = '#333'): void {
        this.parts.push(
            `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" ` +
            `fill="${fill}">${escapeXml(content)}</text>`);
    }

    render(): string {
        return this.parts.join('\n') + '\n</svg>\n';
    }
}

function escapeXml(s: string): string {
    return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function axes(doc: SvgDoc, box: Box, xLabel: string, yLabel: string,
                     xTicks: Array<[number, string]>, yTicks: Array<[number, string]>): void {
    const x0 = box.left;
    const x1 = box.width - box.right;
    const y0 = box.height - box.bottom;
    const y1 = box.top;
    doc.line(x0, y0, x1, y0, '#444');
    doc.line(x0, y0, x0, y1, '#444');
    for (const [px, label] of xTicks) {
        doc.line(px, y0, px, y0 + 4, '#444');
        doc.text(px, y0 + 18, label, 11, 'middle');
    }
    for (const [py, label] of yTicks) {
        doc.line(x0 - 4, py, x0, py, '#444');
        doc.text(x0 - 8, py + 4, label, 11, 'end');
    }
    doc.text((x0 + x1) / 2, box.height - 8, xLabel, 12, 'middle');
    doc.text(14, (y0 + y1) / 2, yLabel, 12, 'middle');
}
