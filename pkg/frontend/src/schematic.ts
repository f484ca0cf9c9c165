// 2D face schematic driven directly by the 31 motion intensities.
// Pure geometry: the functions here compute positions and SVG path
// strings; main.ts only pastes them into the document.

export interface Point {
  x: number;
  y: number;
}

export interface SchematicModel {
  headTransform: string; // SVG transform for turn/tilt
  leftPupil: Point;
  rightPupil: Point;
  leftLid: { openness: number }; // 0 closed .. 1 wide open
  rightLid: { openness: number };
  leftBrow: { inner: Point; outer: Point };
  rightBrow: { inner: Point; outer: Point };
  mouthPath: string;
  jawDrop: number;
}

// canvas-space constants (viewBox 0 0 200 220)
const LEFT_EYE: Point = { x: 70, y: 90 };
const RIGHT_EYE: Point = { x: 130, y: 90 };
const EYE_RADIUS = 13;
const MOUTH_CENTER: Point = { x: 100, y: 160 };
const MOUTH_HALF_WIDTH = 26;

const m = (motions: Record<number, number>, id: number) => motions[id] ?? 0;

export function buildSchematic(motions: Record<number, number>): SchematicModel {
  // neck: turn shifts the whole face, tilt rotates it
  const turn = m(motions, 29);
  const nod = m(motions, 30);
  const tilt = m(motions, 31);
  const headTransform = `translate(${(turn / 83) * 18} ${(nod / 40) * -10}) rotate(${-tilt} 100 110)`;

  // pupils follow eye yaw/pitch
  const pupil = (eye: Point, yaw: number): Point => ({
    x: eye.x + (yaw / 35) * (EYE_RADIUS - 4),
    y: eye.y - (m(motions, 3) / 14) * (EYE_RADIUS - 4),
  });

  // eyelids: open (4) widens, close (5) shuts; lower-lid close (7)
  // narrows a little from below
  const openness = Math.max(
    0,
    Math.min(1.4, 0.8 + 0.6 * m(motions, 4) - 0.8 * m(motions, 5) - 0.25 * m(motions, 7)),
  );

  const brow = (side: 'left' | 'right') => {
    const sign = side === 'left' ? -1 : 1;
    const eye = side === 'left' ? LEFT_EYE : RIGHT_EYE;
    const outerUp = m(motions, side === 'left' ? 8 : 9);
    const outerDown = m(motions, side === 'left' ? 10 : 11);
    const innerUp = m(motions, side === 'left' ? 12 : 13);
    const frown = m(motions, side === 'left' ? 14 : 15);
    return {
      inner: {
        x: eye.x - sign * 8 + sign * 4 * frown,
        y: eye.y - 24 - 8 * innerUp + 6 * frown,
      },
      outer: {
        x: eye.x + sign * 14,
        y: eye.y - 22 - 8 * outerUp + 8 * outerDown,
      },
    };
  };

  // mouth corners: pull (20/21) widens, pucker (22) narrows both,
  // up (23/24) raises, down (25/26) lowers; cheeks (16/17) add lift
  const corner = (side: 'left' | 'right'): Point => {
    const sign = side === 'left' ? -1 : 1;
    const pull = m(motions, side === 'left' ? 20 : 21);
    const up = m(motions, side === 'left' ? 23 : 24);
    const down = m(motions, side === 'left' ? 25 : 26);
    const cheek = m(motions, side === 'left' ? 16 : 17);
    const pucker = m(motions, 22);
    return {
      x: MOUTH_CENTER.x + sign * (MOUTH_HALF_WIDTH + 8 * pull - 12 * pucker),
      y: MOUTH_CENTER.y - 10 * up - 4 * cheek + 10 * down,
    };
  };

  const jawDrop = Math.max(0, m(motions, 27) - 0.6 * m(motions, 28));
  const upperLift = 6 * m(motions, 18);
  const lowerDrop = 6 * m(motions, 19) + 16 * jawDrop;
  const left = corner('left');
  const right = corner('right');
  const upperMid = { x: MOUTH_CENTER.x, y: MOUTH_CENTER.y - 2 - upperLift };
  const lowerMid = { x: MOUTH_CENTER.x, y: MOUTH_CENTER.y + 2 + lowerDrop };
  const mouthPath =
    `M ${left.x.toFixed(2)} ${left.y.toFixed(2)} ` +
    `Q ${upperMid.x.toFixed(2)} ${upperMid.y.toFixed(2)} ${right.x.toFixed(2)} ${right.y.toFixed(2)} ` +
    `Q ${lowerMid.x.toFixed(2)} ${lowerMid.y.toFixed(2)} ${left.x.toFixed(2)} ${left.y.toFixed(2)} Z`;

  return {
    headTransform,
    leftPupil: pupil(LEFT_EYE, m(motions, 1)),
    rightPupil: pupil(RIGHT_EYE, m(motions, 2)),
    leftLid: { openness },
    rightLid: { openness },
    leftBrow: brow('left'),
    rightBrow: brow('right'),
    mouthPath,
    jawDrop,
  };
}

/** Corner heights relative to the mouth center; negative = raised. */
export function mouthCornerHeights(model: SchematicModel): { left: number; right: number } {
  const parse = model.mouthPath.match(/M ([-\d.]+) ([-\d.]+) Q [-\d.]+ [-\d.]+ ([-\d.]+) ([-\d.]+)/);
  if (!parse) throw new Error('unparseable mouth path');
  return {
    left: Number(parse[2]) - MOUTH_CENTER.y,
    right: Number(parse[4]) - MOUTH_CENTER.y,
  };
}
