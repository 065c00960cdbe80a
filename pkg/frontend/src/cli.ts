#!/usr/bin/env node
/**
 * plots curves <spec.json>
 * plots compare <report.json> -o <out.svg>
 */
import { readFileSync } from 'fs';
import { renderCurves } from './curves';
import { readReport, renderComparison } from './compare';
import { CurveSpec, EmptyMetricsError, MalformedReportError, UnknownAxisError } from './types';

function usage(): never {
    console.error('usage: plots curves <spec.json> | plots compare <report.json> -o <out.svg>');
    process.exit(2);
}

export function main(argv: string[]): number {
    const [command, ...rest] = argv;
    try {
        if (command === 'curves') {
            if (rest.length !== 1) usage();
            const spec = JSON.parse(readFileSync(rest[0], 'utf8')) as CurveSpec;
            const out = renderCurves(spec);
            console.log(out);
        } else if (command === 'compare') {
            const oIdx = rest.indexOf('-o');
            if (rest.length < 1 || oIdx === -1 || !rest[oIdx + 1]) usage();
            const report = readReport(rest[0]);
            const out = renderComparison(report, rest[oIdx + 1]);
            console.log(out);
        } else {
            usage();
        }
    } catch (err) {
        if (err instanceof EmptyMetricsError || err instanceof UnknownAxisError
            || err instanceof MalformedReportError) {
            console.error(`error: ${err.message}`);
            return 2;
        }
        console.error(`error: ${String(err)}`);
        return 3;
    }
    return 0;
}

if (require.main === module) {
    process.exit(main(process.argv.slice(2)));
}
