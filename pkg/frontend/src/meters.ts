// Percept display logic: audio meter scaling, staleness, and the
// disparity readout derived from matched camera points.

import { ConsoleState, STALE_AFTER_MS } from './state.js';

export interface MeterView {
  leftFrac: number; // 0..1 bar fill
  rightFrac: number;
  stale: boolean;
  dominant: 'left' | 'right' | 'balanced';
}

const FULL_SCALE_RMS = 0.5; // a gain-1 sine has rms ~0.707; leave headroom

export function meterView(state: ConsoleState, nowMs: number): MeterView {
  const meters = state.meters;
  const stale = meters.lastUpdateMs === null || nowMs - meters.lastUpdateMs > STALE_AFTER_MS;
  const leftFrac = stale ? 0 : Math.min(1, meters.rmsLeft / FULL_SCALE_RMS);
  const rightFrac = stale ? 0 : Math.min(1, meters.rmsRight / FULL_SCALE_RMS);
  let dominant: MeterView['dominant'] = 'balanced';
  const gap = meters.rmsRight - meters.rmsLeft;
  const floor = 1e-6;
  if (!stale && Math.abs(gap) > Math.max(meters.rmsLeft, meters.rmsRight, floor) * 0.1) {
    dominant = gap > 0 ? 'right' : 'left';
  }
  return { leftFrac, rightFrac, stale, dominant };
}

export interface DisparityView {
  disparityPx: number | null;
  /** rough depth readout assuming the default eye geometry */
  approxDepthM: number | null;
}

const DEFAULT_FOCAL_PX = 320.0;
const DEFAULT_BASELINE_M = 0.062;

export function disparityView(state: ConsoleState): DisparityView {
  const d = state.disparity;
  if (d === null || d <= 0) return { disparityPx: d, approxDepthM: null };
  return { disparityPx: d, approxDepthM: (DEFAULT_FOCAL_PX * DEFAULT_BASELINE_M) / d };
}
