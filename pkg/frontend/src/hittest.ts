/** Click-to-select over the annotated preview: the renderer stamps
 * data-container-id on groups and leaves, so selection is a walk up the
 * ancestor chain from the event target. */

export interface ElementLike {
  getAttribute(name: string): string | null;
  parentElement: ElementLike | null;
}

/** The innermost container id at or above the element, or null. */
export function containerIdAt(el: ElementLike | null): string | null {
  let current = el;
  while (current) {
    const id = current.getAttribute("data-container-id");
    if (id) {
      return id;
    }
    current = current.parentElement;
  }
  return null;
}

/** Leaves carry their basic container's id; for repeated elements the
 * useful selection is usually the repeated child itself, which is exactly
 * the leaf id, so the innermost id wins. */
export function selectionFromClick(target: ElementLike | null): string | null {
  return containerIdAt(target);
}
