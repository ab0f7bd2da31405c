/** `render --kind <k> --in <csv> --out <svg>` batch renderer. */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { FIGURE_KINDS, renderFigure, type FigureKind } from "./figures.js";

export function main(argv: string[]): number {
    const { values, positionals } = parseArgs({
        args: argv,
        allowPositionals: true,
        options: {
            kind: { type: "string" },
            in: { type: "string", multiple: true },
            out: { type: "string" },
            scenario: { type: "string" },
            f: { type: "string" },
            p: { type: "string" },
        },
    });
    if (positionals[0] !== "render") {
        console.error("usage: render --kind <mfa-scan|portrait|phase1|phase2-panel> --in <csv> --out <svg>");
        return 2;
    }
    const kind = values.kind as FigureKind | undefined;
    const inputs = values.in ?? [];
    const out = values.out;
    if (!kind || !FIGURE_KINDS.includes(kind) || inputs.length === 0 || !out) {
        console.error(`render needs --kind (one of ${FIGURE_KINDS.join(", ")}), --in and --out`);
        return 2;
    }
    if (!out.endsWith(".svg")) {
        console.error("only SVG output is supported; pass an --out path ending in .svg");
        return 2;
    }
    try {
        // merge multiple inputs by dropping repeated header lines
        const texts = inputs.map((path) => readFileSync(path, "utf-8"));
        const header = texts[0].split(/\r?\n/, 1)[0];
        const body = texts
            .map((text, i) => {
                const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
                if (lines[0] !== header) {
                    throw new Error(`input ${inputs[i]} has a different header`);
                }
                return lines.slice(1).join("\n");
            })
            .filter((chunk) => chunk.length > 0)
            .join("\n");
        const svg = renderFigure(kind, `${header}\n${body}`, {
            scenario: values.scenario,
            f: values.f,
            p: values.p,
        });
        writeFileSync(out, svg, "utf-8");
        console.log(out);
        return 0;
    } catch (err) {
        console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
        return 1;
    }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
    process.exit(main(process.argv.slice(2)));
}
