/** Minimal CSV reader for the simulation result schemas (no quoting). */

export interface Table {
    header: string[];
    rows: string[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string): Table {
    const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
    if (lines.length === 0) {
        throw new CsvError("empty CSV input");
    }
    const header = lines[0].split(",");
    const rows = lines.slice(1).map((line) => line.split(","));
    for (const row of rows) {
        if (row.length !== header.length) {
            throw new CsvError(
                `row has ${row.length} fields, header has ${header.length}`,
            );
        }
    }
    return { header, rows };
}

/** Column accessor that fails loudly when the schema does not match. */
export function columns(table: Table, names: string[]): Map<string, number> {
    const index = new Map<string, number>();
    for (const name of names) {
        const at = table.header.indexOf(name);
        if (at < 0) {
            throw new CsvError(
                `missing column '${name}' (header: ${table.header.join(",")})`,
            );
        }
        index.set(name, at);
    }
    return index;
}

export function requireRows(table: Table): void {
    if (table.rows.length === 0) {
        throw new CsvError("CSV has a header but no data rows");
    }
}
