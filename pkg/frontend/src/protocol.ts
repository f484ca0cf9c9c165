// JSON mirror of the operator daemon's console bridge, plus the motion
// tables the console needs to clamp client-side exactly like the
// server does.

export interface MotionInfo {
  lo: number;
  hi: number;
  unit: 'deg' | 'norm';
  description: string;
}

export interface HelloMsg {
  type: 'hello';
  version: number;
  cycle_ms: number;
  motors: string[];
  presets: string[];
  motions: Record<string, MotionInfo>;
}

export interface JointStatesMsg {
  type: 'joint_states';
  t: number;
  positions: number[];
  velocities: number[];
  inputs: number[];
}

export interface AudioLevelsMsg {
  type: 'audio_levels';
  seq: number;
  t: number;
  rms_left: number;
  rms_right: number;
}

export interface CameraPointsMsg {
  type: 'camera_points';
  eye: 'left' | 'right';
  seq: number;
  t: number;
  points: [number, number, number][]; // [id, u, v]
}

export interface ErrorMsg {
  type: 'error';
  message: string;
}

export type ServerMsg = HelloMsg | JointStatesMsg | AudioLevelsMsg | CameraPointsMsg | ErrorMsg;

export type Command =
  | { type: 'set_emotion'; name: string }
  | { type: 'set_au'; intensities: Record<string, number> }
  | { type: 'set_neck'; yaw: number; pitch: number; roll: number }
  | { type: 'set_eyes'; yaw_left: number; yaw_right: number; pitch: number }
  | { type: 'set_motions'; targets: Record<string, number> }
  | { type: 'play_tone'; position: number; duration_s?: number; tone_hz?: number };

export const MOTOR_COUNT = 21;
export const MOTION_COUNT = 31;

// Embedded fallback for the motion table; the server's hello message is
// authoritative once connected (same numbers unless its rig table was
// overridden).
export const MOTION_RANGES: Record<number, MotionInfo> = {
  1: { lo: -35, hi: 35, unit: 'deg', description: 'Left eye turns left/right' },
  2: { lo: -35, hi: 35, unit: 'deg', description: 'Right eye turns left/right' },
  3: { lo: -14, hi: 8, unit: 'deg', description: 'Eyes up/down' },
  4: { lo: 0, hi: 1, unit: 'norm', description: 'Upper eyelid open' },
  5: { lo: 0, hi: 1, unit: 'norm', description: 'Upper eyelid close' },
  6: { lo: 0, hi: 1, unit: 'norm', description: 'Lower eyelid open' },
  7: { lo: 0, hi: 1, unit: 'norm', description: 'Lower eyelid close' },
  8: { lo: 0, hi: 1, unit: 'norm', description: 'Left outer eyebrow up' },
  9: { lo: 0, hi: 1, unit: 'norm', description: 'Right outer eyebrow up' },
  10: { lo: 0, hi: 1, unit: 'norm', description: 'Left outer eyebrow down' },
  11: { lo: 0, hi: 1, unit: 'norm', description: 'Right outer eyebrow down' },
  12: { lo: 0, hi: 1, unit: 'norm', description: 'Left inner eyebrow up' },
  13: { lo: 0, hi: 1, unit: 'norm', description: 'Right inner eyebrow up' },
  14: { lo: 0, hi: 1, unit: 'norm', description: 'Left inner eyebrow frown' },
  15: { lo: 0, hi: 1, unit: 'norm', description: 'Right inner eyebrow frown' },
  16: { lo: 0, hi: 1, unit: 'norm', description: 'Left cheek pull' },
  17: { lo: 0, hi: 1, unit: 'norm', description: 'Right cheek pull' },
  18: { lo: 0, hi: 1, unit: 'norm', description: 'Upper lip up' },
  19: { lo: 0, hi: 1, unit: 'norm', description: 'Lower lip down' },
  20: { lo: 0, hi: 1, unit: 'norm', description: 'Left corner of the mouth pull' },
  21: { lo: 0, hi: 1, unit: 'norm', description: 'Right corner of the mouth pull' },
  22: { lo: 0, hi: 1, unit: 'norm', description: 'Mouth pucker' },
  23: { lo: 0, hi: 1, unit: 'norm', description: 'Left corner of the mouth up' },
  24: { lo: 0, hi: 1, unit: 'norm', description: 'Right corner of the mouth up' },
  25: { lo: 0, hi: 1, unit: 'norm', description: 'Left corner of the mouth down' },
  26: { lo: 0, hi: 1, unit: 'norm', description: 'Right corner of the mouth down' },
  27: { lo: 0, hi: 1, unit: 'norm', description: 'Jaw open' },
  28: { lo: 0, hi: 1, unit: 'norm', description: 'Jaw close' },
  29: { lo: -83, hi: 83, unit: 'deg', description: 'Head turn' },
  30: { lo: -30, hi: 40, unit: 'deg', description: 'Head up and down' },
  31: { lo: -21, hi: 21, unit: 'deg', description: 'Head tilt' },
};

// dual-use motors: forward terminal motion, reverse terminal motion
const DUAL_TERMINALS: Record<number, [number, number]> = {
  4: [4, 5],
  5: [6, 7],
  6: [8, 10],
  7: [9, 11],
  8: [12, 15],
  9: [13, 14],
  16: [23, 25],
  17: [24, 26],
  18: [27, 28],
};
// motors 14/15 share their reverse terminals on the pucker (motion 22)
const PULL_MOTORS: [number, number] = [14, 15];
const SINGLE_MOTORS: Record<number, number> = { 10: 16, 11: 17, 12: 18, 13: 19 };

export interface ClampResult {
  value: number;
  clamped: boolean;
}

export function clampMotion(
  id: number,
  value: number,
  table: Record<string, MotionInfo> | null = null,
): ClampResult {
  const info = table?.[String(id)] ?? MOTION_RANGES[id];
  if (!info) throw new Error(`unknown motion id ${id}`);
  const v = Math.min(Math.max(value, info.lo), info.hi);
  return { value: v, clamped: v !== value };
}

/**
 * Derive the 31 motion intensities back from the 21 motor positions.
 * This is what lets the face schematic run straight off joint_states:
 * a dual-use motor's positive excursion is its forward motion, the
 * negative excursion its reverse motion, and the neck pair folds back
 * into yaw/pitch/roll via the differential relations.
 */
export function motorsToMotions(positions: number[]): Record<number, number> {
  if (positions.length !== MOTOR_COUNT) {
    throw new Error(`expected ${MOTOR_COUNT} motor positions, got ${positions.length}`);
  }
  const p = (motor: number) => positions[motor - 1];
  const motions: Record<number, number> = {};
  motions[1] = p(1);
  motions[2] = p(2);
  motions[3] = p(3);
  for (const [motorStr, [plus, minus]] of Object.entries(DUAL_TERMINALS)) {
    const value = p(Number(motorStr));
    motions[plus] = Math.max(value, 0);
    motions[minus] = Math.max(-value, 0);
  }
  for (const [motorStr, motion] of Object.entries(SINGLE_MOTORS)) {
    motions[motion] = Math.max(p(Number(motorStr)), 0);
  }
  const [pl, pr] = PULL_MOTORS;
  motions[20] = Math.max(p(pl), 0);
  motions[21] = Math.max(p(pr), 0);
  motions[22] = Math.max(Math.min(-p(pl), -p(pr)), 0);
  motions[29] = p(19);
  motions[30] = (p(20) + p(21)) / 2;
  motions[31] = (p(20) - p(21)) / 2;
  return motions;
}

export function parseServerMsg(raw: string): ServerMsg {
  const msg = JSON.parse(raw);
  if (typeof msg !== 'object' || msg === null || typeof msg.type !== 'string') {
    throw new Error('malformed server message');
  }
  return msg as ServerMsg;
}
