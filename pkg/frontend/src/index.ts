export {
  methodOrder,
  parsePosteriorCsv,
  parseTimingCsv,
  POSTERIOR_HEADER,
  TIMING_HEADER,
  type PosteriorRow,
  type TimingRow,
} from './csv.js';
export {
  fmtTick,
  linearScale,
  logLogSlope,
  logScale,
  logTicks,
  niceTicks,
  type Scale,
} from './scale.js';
export { renderPosteriorFigure, POSTERIOR_PAGE } from './posterior.js';
export { renderTimingFigure, TIMING_PAGE } from './timing.js';
export { parseArgs, renderToBuffer, runCli } from './cli.js';
