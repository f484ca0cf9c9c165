// Browser entry point: builds the control panel and percept displays,
// renders everything from the central store.  Pure wiring; the logic
// lives in the other modules.

import { CommandPanel } from './controls.js';
import { disparityView, meterView } from './meters.js';
import { MOTION_RANGES } from './protocol.js';
import { buildSchematic } from './schematic.js';
import { ConsoleStore } from './state.js';
import { ConsoleClient } from './wsclient.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text) node.textContent = text;
  return node;
}

function wsUrl(): string {
  const params = new URLSearchParams(location.search);
  return params.get('ws') ?? `ws://${location.hostname || '127.0.0.1'}:7742/ws`;
}

function main(): void {
  const store = new ConsoleStore();
  const client = new ConsoleClient(wsUrl(), store);
  const panel = new CommandPanel(client);

  const root = document.getElementById('app')!;
  const status = el('div', { class: 'status' }, 'connecting');
  root.appendChild(status);

  // preset buttons
  const presetRow = el('div', { class: 'presets' });
  root.appendChild(presetRow);

  // face schematic svg
  const svgNS = 'http://www.w3.org/2000/svg';
  const svg = document.createElementNS(svgNS, 'svg');
  svg.setAttribute('viewBox', '0 0 200 220');
  svg.setAttribute('width', '300');
  const face = document.createElementNS(svgNS, 'g');
  face.innerHTML =
    '<circle cx="100" cy="110" r="85" fill="#f4e3d3" stroke="#333"/>' +
    '<ellipse id="eyeL" cx="70" cy="90" rx="13" ry="9" fill="#fff" stroke="#333"/>' +
    '<ellipse id="eyeR" cx="130" cy="90" rx="13" ry="9" fill="#fff" stroke="#333"/>' +
    '<circle id="pupilL" cx="70" cy="90" r="4" fill="#222"/>' +
    '<circle id="pupilR" cx="130" cy="90" r="4" fill="#222"/>' +
    '<path id="browL" d="" stroke="#664" stroke-width="3" fill="none"/>' +
    '<path id="browR" d="" stroke="#664" stroke-width="3" fill="none"/>' +
    '<path id="mouth" d="" stroke="#a33" stroke-width="2" fill="#e8b4a8"/>';
  svg.appendChild(face);
  root.appendChild(svg);

  // meters + disparity
  const meterBox = el('div', { class: 'meters' });
  const meterLeft = el('div', { class: 'bar left' });
  const meterRight = el('div', { class: 'bar right' });
  const meterLabel = el('div', {}, 'audio: -');
  const disparityLabel = el('div', {}, 'disparity: -');
  meterBox.append(meterLeft, meterRight, meterLabel, disparityLabel);
  root.appendChild(meterBox);

  // clamp notices
  const notices = el('div', { class: 'notices' });
  root.appendChild(notices);

  // sliders for all 31 motions
  const sliders = el('div', { class: 'sliders' });
  for (const [idStr, info] of Object.entries(MOTION_RANGES)) {
    const id = Number(idStr);
    const row = el('label', {}, `${id} ${info.description} `);
    const input = el('input', {
      type: 'range',
      min: String(info.lo),
      max: String(info.hi),
      step: info.unit === 'deg' ? '1' : '0.05',
      value: '0',
    });
    input.addEventListener('input', () => panel.setMotion(id, Number(input.value)));
    row.appendChild(input);
    sliders.appendChild(row);
  }
  root.appendChild(sliders);

  store.subscribe((state) => {
    status.textContent = `connection: ${state.connection}`
      + (state.droppedCommands ? ` (dropped ${state.droppedCommands} commands)` : '');

    if (state.hello && presetRow.childElementCount === 0) {
      for (const preset of state.hello.presets) {
        const button = el('button', {}, preset);
        button.addEventListener('click', () => panel.selectPreset(preset));
        presetRow.appendChild(button);
      }
      const neutral = el('button', {}, 'Neutral');
      neutral.addEventListener('click', () =>
        panel.selectPreset('Happiness') /* placeholder replaced below */,
      );
      neutral.onclick = () => {
        for (const id of Object.keys(MOTION_RANGES)) panel.setMotion(Number(id), 0);
        panel.flush();
      };
      presetRow.appendChild(neutral);
    }

    const model = buildSchematic(state.motions);
    face.setAttribute('transform', model.headTransform);
    (face.querySelector('#pupilL') as SVGCircleElement).setAttribute('cx', String(model.leftPupil.x));
    (face.querySelector('#pupilL') as SVGCircleElement).setAttribute('cy', String(model.leftPupil.y));
    (face.querySelector('#pupilR') as SVGCircleElement).setAttribute('cx', String(model.rightPupil.x));
    (face.querySelector('#pupilR') as SVGCircleElement).setAttribute('cy', String(model.rightPupil.y));
    (face.querySelector('#eyeL') as SVGEllipseElement).setAttribute('ry', String(9 * model.leftLid.openness));
    (face.querySelector('#eyeR') as SVGEllipseElement).setAttribute('ry', String(9 * model.rightLid.openness));
    const browPath = (b: { inner: { x: number; y: number }; outer: { x: number; y: number } }) =>
      `M ${b.inner.x} ${b.inner.y} L ${b.outer.x} ${b.outer.y}`;
    (face.querySelector('#browL') as SVGPathElement).setAttribute('d', browPath(model.leftBrow));
    (face.querySelector('#browR') as SVGPathElement).setAttribute('d', browPath(model.rightBrow));
    (face.querySelector('#mouth') as SVGPathElement).setAttribute('d', model.mouthPath);

    const meters = meterView(state, Date.now());
    meterLeft.style.width = `${Math.round(meters.leftFrac * 150)}px`;
    meterRight.style.width = `${Math.round(meters.rightFrac * 150)}px`;
    meterLabel.textContent = meters.stale
      ? 'audio: stale'
      : `audio: L ${state.meters.rmsLeft.toFixed(3)} R ${state.meters.rmsRight.toFixed(3)} (${meters.dominant})`;
    const disparity = disparityView(state);
    disparityLabel.textContent =
      disparity.disparityPx === null
        ? 'disparity: -'
        : `disparity: ${disparity.disparityPx.toFixed(2)} px`
          + (disparity.approxDepthM ? ` (~${disparity.approxDepthM.toFixed(2)} m)` : '');

    notices.textContent = state.clampNotices.slice(-3).join(' | ');
  });

  client.connect();
}

main();
