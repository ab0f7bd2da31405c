/** The four figure kinds rendered from harness CSV output.
 *
 * Every renderer reads only the documented CSV schemas, aggregates with
 * plain arithmetic, and emits a deterministic SVG string.
 */

import { columns, parseCsv, requireRows, type Table } from "./csv.js";
import { Chart } from "./svg.js";
import { seriesColor, strategyStyle } from "./style.js";

export const FIGURE_KINDS = ["mfa-scan", "portrait", "phase1", "phase2-panel"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface PanelFilter {
    scenario?: string;
    f?: string;
    p?: string;
}

function meanBy<K>(pairs: [K, number][]): Map<K, number> {
    const sums = new Map<K, { total: number; count: number }>();
    for (const [key, value] of pairs) {
        const cur = sums.get(key) ?? { total: 0, count: 0 };
        cur.total += value;
        cur.count += 1;
        sums.set(key, cur);
    }
    const out = new Map<K, number>();
    for (const [key, { total, count }] of sums) {
        out.set(key, total / count);
    }
    return out;
}

/** Stationary concentration vs noise level (one curve). */
export function renderMfaScan(table: Table): string {
    requireRows(table);
    const col = columns(table, ["p", "c_A_stationary"]);
    const points: [number, number][] = table.rows.map((row) => [
        Number(row[col.get("p")!]),
        Number(row[col.get("c_A_stationary")!]),
    ]);
    points.sort((a, b) => a[0] - b[0]);
    const chart = new Chart(
        { xMin: points[0][0], xMax: points[points.length - 1][0], yMin: 0, yMax: 1 },
        "Stationary state vs noise", "p", "c_A",
    );
    chart.line(points, { color: "blue" }, 2);
    for (const [p, ca] of points) chart.dot(p, ca, "blue", 2);
    return chart.render();
}

/** Simplex phase portrait: start dots, start-to-attractor segments, and one
 * red star per attractor. */
export function renderPortrait(table: Table): string {
    requireRows(table);
    const col = columns(table, ["start_cA", "start_cB", "end_cA", "end_cB", "attractor_id"]);
    const chart = new Chart({ xMin: 0, xMax: 1, yMin: 0, yMax: 1 },
        "Phase portrait", "c_A", "c_B");
    chart.line([[0, 0], [1, 0], [0, 1], [0, 0]], { color: "#444444" }, 1);
    const attractors = new Map<number, [number, number]>();
    for (const row of table.rows) {
        const sa = Number(row[col.get("start_cA")!]);
        const sb = Number(row[col.get("start_cB")!]);
        const ea = Number(row[col.get("end_cA")!]);
        const eb = Number(row[col.get("end_cB")!]);
        const id = Number(row[col.get("attractor_id")!]);
        chart.segment(sa, sb, ea, eb, "#999999", 0.6);
        chart.dot(sa, sb, "orange", 3);
        attractors.set(id, [ea, eb]);
    }
    for (const id of [...attractors.keys()].sort((a, b) => a - b)) {
        const [ea, eb] = attractors.get(id)!;
        chart.star(ea, eb, "red");
    }
    return chart.render();
}

type RowsIndex = {
    scenario: number; strategy: number; f: number; p: number;
    realization: number; mcs: number; cA: number;
};

function rowsIndex(table: Table): RowsIndex {
    const col = columns(table, ["scenario", "strategy", "f", "p", "realization", "mcs", "c_A"]);
    return {
        scenario: col.get("scenario")!, strategy: col.get("strategy")!,
        f: col.get("f")!, p: col.get("p")!, realization: col.get("realization")!,
        mcs: col.get("mcs")!, cA: col.get("c_A")!,
    };
}

/** Network phase diagram: mean final c_A vs p, one curve per scenario. */
export function renderPhase1(table: Table): string {
    requireRows(table);
    const ix = rowsIndex(table);
    // final mcs per (scenario, p, realization)
    const finals = new Map<string, { mcs: number; cA: number }>();
    for (const row of table.rows) {
        const key = `${row[ix.scenario]}|${row[ix.p]}|${row[ix.realization]}`;
        const mcs = Number(row[ix.mcs]);
        const cur = finals.get(key);
        if (!cur || mcs >= cur.mcs) {
            finals.set(key, { mcs, cA: Number(row[ix.cA]) });
        }
    }
    const perCurve = new Map<string, [number, number][]>();
    const cellMeans = meanBy(
        [...finals.entries()].map(([key, { cA }]) => {
            const [scenario, p] = key.split("|");
            return [`${scenario}|${p}`, cA] as [string, number];
        }),
    );
    for (const [key, mean] of cellMeans) {
        const [scenario, p] = key.split("|");
        const curve = perCurve.get(scenario) ?? [];
        curve.push([Number(p), mean]);
        perCurve.set(scenario, curve);
    }
    const ps = [...cellMeans.keys()].map((k) => Number(k.split("|")[1]));
    const chart = new Chart(
        { xMin: Math.min(...ps), xMax: Math.max(...ps), yMin: 0, yMax: 1 },
        "Consensus stability vs noise", "p", "mean final c_A",
    );
    const scenarios = [...perCurve.keys()].sort();
    scenarios.forEach((scenario, i) => {
        const curve = perCurve.get(scenario)!;
        curve.sort((a, b) => a[0] - b[0]);
        const style = { color: seriesColor(i) };
        chart.line(curve, style, 2);
        for (const [x, y] of curve) chart.dot(x, y, style.color, 2);
        chart.legend(scenario, style);
    });
    return chart.render();
}

/** Strategy trajectory panel: mean c_A vs MCS, one curve per strategy in the
 * fixed color map. The filter narrows multi-cell CSVs to one panel. */
export function renderPhase2Panel(table: Table, filter: PanelFilter = {}): string {
    requireRows(table);
    const ix = rowsIndex(table);
    const rows = table.rows.filter((row) =>
        (filter.scenario === undefined || row[ix.scenario] === filter.scenario) &&
        (filter.f === undefined || row[ix.f] === filter.f) &&
        (filter.p === undefined || row[ix.p] === filter.p));
    if (rows.length === 0) {
        throw new Error("no rows left after applying the panel filter");
    }
    const cells = new Set(rows.map((row) => `${row[ix.scenario]}|${row[ix.f]}|${row[ix.p]}`));
    if (cells.size > 1) {
        throw new Error(
            `panel input spans ${cells.size} cells; narrow with --scenario/--f/--p ` +
            `(found: ${[...cells].sort().join(" ; ")})`,
        );
    }
    const perStrategy = new Map<string, Map<number, number>>();
    const grouped = meanBy(rows.map((row) =>
        [`${row[ix.strategy]}|${row[ix.mcs]}`, Number(row[ix.cA])] as [string, number]));
    for (const [key, mean] of grouped) {
        const [strategy, mcs] = key.split("|");
        const curve = perStrategy.get(strategy) ?? new Map<number, number>();
        curve.set(Number(mcs), mean);
        perStrategy.set(strategy, curve);
    }
    let maxMcs = 0;
    let maxCa = 0;
    for (const curve of perStrategy.values()) {
        for (const [mcs, ca] of curve) {
            maxMcs = Math.max(maxMcs, mcs);
            maxCa = Math.max(maxCa, ca);
        }
    }
    const [cell] = cells;
    const [scenario, f, p] = cell.split("|");
    const chart = new Chart(
        { xMin: 0, xMax: maxMcs || 1, yMin: 0, yMax: Math.max(0.1, Math.min(1, maxCa * 1.15)) },
        `${scenario} (f=${f}, p=${p})`, "MCS", "mean c_A",
    );
    for (const strategy of [...perStrategy.keys()].sort()) {
        const curve = [...perStrategy.get(strategy)!.entries()]
            .sort((a, b) => a[0] - b[0]) as [number, number][];
        const style = strategyStyle(strategy);
        chart.line(curve, style, 2);
        chart.legend(strategy, style);
    }
    return chart.render();
}

export function renderFigure(kind: FigureKind, csvText: string,
                             filter: PanelFilter = {}): string {
    const table = parseCsv(csvText);
    switch (kind) {
        case "mfa-scan":
            return renderMfaScan(table);
        case "portrait":
            return renderPortrait(table);
        case "phase1":
            return renderPhase1(table);
        case "phase2-panel":
            return renderPhase2Panel(table, filter);
    }
}
