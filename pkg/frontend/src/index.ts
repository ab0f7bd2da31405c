export { parseCsv, columns, CsvError, type Table } from "./csv.js";
export {
    FIGURE_KINDS,
    renderFigure,
    renderMfaScan,
    renderPhase1,
    renderPhase2Panel,
    renderPortrait,
    type FigureKind,
    type PanelFilter,
} from "./figures.js";
export { STRATEGY_STYLE, strategyStyle, seriesColor } from "./style.js";
