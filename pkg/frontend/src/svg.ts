/** Deterministic SVG chart assembly: fixed canvas, fonts and rounding, so
 * identical inputs serialize to identical bytes. */

import type { StrokeStyle } from "./style.js";

export const WIDTH = 720;
export const HEIGHT = 480;
const MARGIN = { left: 64, right: 24, top: 40, bottom: 48 };

export interface Domain {
    xMin: number;
    xMax: number;
    yMin: number;
    yMax: number;
}

const fmt = (v: number): string => v.toFixed(2);

export class Chart {
    private parts: string[] = [];
    private legendEntries: { label: string; style: StrokeStyle }[] = [];

    constructor(
        private domain: Domain,
        private title: string,
        private xLabel: string,
        private yLabel: string,
    ) {}

    x(v: number): number {
        const { xMin, xMax } = this.domain;
        const span = xMax - xMin || 1;
        return MARGIN.left + ((v - xMin) / span) * (WIDTH - MARGIN.left - MARGIN.right);
    }

    y(v: number): number {
        const { yMin, yMax } = this.domain;
        const span = yMax - yMin || 1;
        return HEIGHT - MARGIN.bottom - ((v - yMin) / span) * (HEIGHT - MARGIN.top - MARGIN.bottom);
    }

    line(points: [number, number][], style: StrokeStyle, width = 1.5): void {
        if (points.length === 0) return;
        const d = points
            .map(([px, py], i) => `${i === 0 ? "M" : "L"}${fmt(this.x(px))} ${fmt(this.y(py))}`)
            .join(" ");
        const dash = style.dash ? ` stroke-dasharray="${style.dash}"` : "";
        this.parts.push(
            `<path d="${d}" fill="none" stroke="${style.color}" stroke-width="${width}"${dash}/>`,
        );
    }

    dot(px: number, py: number, color: string, r = 3): void {
        this.parts.push(
            `<circle cx="${fmt(this.x(px))}" cy="${fmt(this.y(py))}" r="${r}" fill="${color}"/>`,
        );
    }

    /** Five-pointed star marker, used for attractors. */
    star(px: number, py: number, color: string, size = 9): void {
        const cx = this.x(px);
        const cy = this.y(py);
        const points: string[] = [];
        for (let i = 0; i < 10; i++) {
            const radius = i % 2 === 0 ? size : size * 0.42;
            const angle = -Math.PI / 2 + (i * Math.PI) / 5;
            points.push(`${fmt(cx + radius * Math.cos(angle))},${fmt(cy + radius * Math.sin(angle))}`);
        }
        this.parts.push(
            `<polygon points="${points.join(" ")}" fill="${color}" class="attractor-star"/>`,
        );
    }

    segment(x1: number, y1: number, x2: number, y2: number, color: string, opacity: number): void {
        this.parts.push(
            `<line x1="${fmt(this.x(x1))}" y1="${fmt(this.y(y1))}" x2="${fmt(this.x(x2))}" ` +
            `y2="${fmt(this.y(y2))}" stroke="${color}" stroke-width="1" stroke-opacity="${opacity}"/>`,
        );
    }

    legend(label: string, style: StrokeStyle): void {
        this.legendEntries.push({ label, style });
    }

    private axes(): string {
        const { xMin, xMax, yMin, yMax } = this.domain;
        const out: string[] = [];
        const x0 = MARGIN.left;
        const x1 = WIDTH - MARGIN.right;
        const y0 = HEIGHT - MARGIN.bottom;
        const y1 = MARGIN.top;
        out.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
        out.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
        const ticks = 5;
        for (let i = 0; i <= ticks; i++) {
            const xv = xMin + ((xMax - xMin) * i) / ticks;
            const yv = yMin + ((yMax - yMin) * i) / ticks;
            const xp = fmt(this.x(xv));
            const yp = fmt(this.y(yv));
            out.push(`<line x1="${xp}" y1="${y0}" x2="${xp}" y2="${y0 + 5}" stroke="black"/>`);
            out.push(
                `<text x="${xp}" y="${y0 + 18}" font-size="11" text-anchor="middle">${xv.toFixed(2)}</text>`,
            );
            out.push(`<line x1="${x0 - 5}" y1="${yp}" x2="${x0}" y2="${yp}" stroke="black"/>`);
            out.push(
                `<text x="${x0 - 8}" y="${yp}" font-size="11" text-anchor="end" dominant-baseline="middle">${yv.toFixed(2)}</text>`,
            );
        }
        out.push(
            `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" font-size="13" text-anchor="middle">${this.xLabel}</text>`,
        );
        out.push(
            `<text x="18" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 ${(y0 + y1) / 2})">${this.yLabel}</text>`,
        );
        out.push(
            `<text x="${WIDTH / 2}" y="22" font-size="15" text-anchor="middle" font-weight="bold">${this.title}</text>`,
        );
        return out.join("\n");
    }

    private legendBlock(): string {
        if (this.legendEntries.length === 0) return "";
        const out: string[] = [];
        const x = WIDTH - MARGIN.right - 150;
        let y = MARGIN.top + 8;
        for (const { label, style } of this.legendEntries) {
            const dash = style.dash ? ` stroke-dasharray="${style.dash}"` : "";
            out.push(
                `<line x1="${x}" y1="${y}" x2="${x + 26}" y2="${y}" stroke="${style.color}" stroke-width="2"${dash}/>`,
            );
            out.push(
                `<text x="${x + 32}" y="${y}" font-size="12" dominant-baseline="middle">${label}</text>`,
            );
            y += 16;
        }
        return out.join("\n");
    }

    render(): string {
        return [
            `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
            `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
            this.axes(),
            this.parts.join("\n"),
            this.legendBlock(),
            "</svg>",
            "",
        ].join("\n");
    }
}
