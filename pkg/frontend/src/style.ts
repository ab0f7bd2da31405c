/** Fixed visual vocabulary shared by all figure kinds. */

export interface StrokeStyle {
    color: string;
    dash?: string;
}

/** Strategy colors are fixed across every figure. */
export const STRATEGY_STYLE: Record<string, StrokeStyle> = {
    voterank: { color: "red" },
    pagerank: { color: "cyan" },
    degree: { color: "blue" },
    kshell: { color: "green" },
    cim: { color: "purple" },
    random: { color: "black", dash: "6 4" },
};

export function strategyStyle(name: string): StrokeStyle {
    return STRATEGY_STYLE[name] ?? { color: "gray" };
}

/** Deterministic fallback palette for non-strategy series (scenarios). */
export const SERIES_PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    "#17becf", "#7f7f7f",
];

export function seriesColor(index: number): string {
    return SERIES_PALETTE[index % SERIES_PALETTE.length];
}
