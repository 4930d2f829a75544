from cebotarev.cli import main

raise SystemExit(main())
