// Arrow keys are the whole control surface: up drives toward the
// bridge, down reverses, anything else is ignored and the server
// defaults the tick to stay.

import type { Action } from "./protocol.js";

export function actionForKey(key: string): Action | null {
  switch (key) {
    case "ArrowUp":
      return "forward";
    case "ArrowDown":
      return "backward";
    default:
      return null;
  }
}

export function attachKeyboard(
  target: { addEventListener: Window["addEventListener"] },
  onAction: (action: Action) => void,
): void {
  target.addEventListener("keydown", (event: KeyboardEvent) => {
    const action = actionForKey(event.key);
    if (action === null) return;
    event.preventDefault(); // keep arrows from scrolling the page
    onAction(action);
  });
}
